#include "pcfgscm/exact_dist.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pcfgscm {

std::size_t VarSchema::index_of(std::string_view value) const {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] == value) return i;
  }
  throw DistributionError("value '" + std::string(value) + "' not in the domain of " + name);
}

Rational Distribution::prob(std::string_view outcome) const {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i] == outcome) return probs[i];
  }
  throw DistributionError("unknown outcome '" + std::string(outcome) + "'");
}

JointTable::JointTable(std::vector<VarSchema> schema, std::map<Cell, Rational> cells) : schema_(std::move(schema)) {
  std::set<std::string> names;
  for (const auto& v : schema_) {
    if (v.name.empty()) throw DistributionError("variable with empty name");
    if (!names.insert(v.name).second) throw DistributionError("duplicate variable " + v.name);
    if (v.domain.empty()) throw DistributionError("empty domain for " + v.name);
    std::set<std::string> values(v.domain.begin(), v.domain.end());
    if (values.size() != v.domain.size()) throw DistributionError("repeated domain value in " + v.name);
  }
  Rational total = 0;
  for (auto& [cell, p] : cells) {
    if (cell.size() != schema_.size()) throw DistributionError("cell arity does not match schema");
    for (std::size_t k = 0; k < cell.size(); ++k) {
      if (cell[k] >= schema_[k].domain.size()) throw DistributionError("cell index out of range for " + schema_[k].name);
    }
    if (p < 0) throw DistributionError("negative probability " + to_string(p));
    total += p;
    if (p > 0) cells_.emplace(cell, p);
  }
  if (total != 1) throw DistributionError("joint table sums to " + to_string(total) + ", expected 1");
}

std::size_t JointTable::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  throw DistributionError("unknown variable " + std::string(name));
}

Rational JointTable::prob(const std::vector<std::string>& values) const {
  if (values.size() != schema_.size()) throw DistributionError("assignment arity does not match schema");
  Cell cell(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) cell[k] = schema_[k].index_of(values[k]);
  auto it = cells_.find(cell);
  return it == cells_.end() ? Rational(0) : it->second;
}

const ConditionalRow* ConditionalTable::find(const std::vector<std::string>& given_values) const {
  for (const auto& row : rows) {
    if (row.given == given_values) return &row;
  }
  return nullptr;
}

namespace {

std::vector<std::size_t> positions(const JointTable& j, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(j.var_index(n));
  return out;
}

Cell project(const Cell& cell, const std::vector<std::size_t>& pos) {
  Cell out(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) out[k] = cell[pos[k]];
  return out;
}

std::size_t cross_size(const std::vector<VarSchema>& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) n *= v.domain.size();
  return n;
}

// Row-major flat index of `cell` over `vars`.
std::size_t flat_index(const Cell& cell, const std::vector<VarSchema>& vars) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) idx = idx * vars[k].domain.size() + cell[k];
  return idx;
}

std::vector<std::string> outcome_labels(const std::vector<VarSchema>& vars) {
  std::vector<std::string> labels{""};
  for (std::size_t k = 0; k < vars.size(); ++k) {
    std::vector<std::string> next;
    for (const auto& prefix : labels) {
      for (const auto& v : vars[k].domain) next.push_back(k == 0 ? v : prefix + "," + v);
    }
    labels = std::move(next);
  }
  return labels;
}

std::vector<std::string> values_of(const Cell& cell, const std::vector<VarSchema>& vars) {
  std::vector<std::string> out(cell.size());
  for (std::size_t k = 0; k < cell.size(); ++k) out[k] = vars[k].domain[cell[k]];
  return out;
}

// (1+d)ln(1+d) - d, accurate and strictly positive for small nonzero d.
double kl_term(double d) {
  if (d <= -1) return 1.0;
  if (std::abs(d) < 1e-4) {
    return d * d * (0.5 - d * (1.0 / 6 - d * (1.0 / 12 - d / 20)));
  }
  return (1 + d) * std::log1p(d) - d;
}

}  // namespace

JointTable marginalize(const JointTable& j, const std::vector<std::string>& keep) {
  std::set<std::size_t> wanted;
  for (const auto& n : keep) wanted.insert(j.var_index(n));
  const std::vector<std::size_t> pos(wanted.begin(), wanted.end());
  std::vector<VarSchema> schema;
  for (auto p : pos) schema.push_back(j.schema()[p]);
  std::map<Cell, Rational> cells;
  for (const auto& [cell, p] : j.cells()) cells[project(cell, pos)] += p;
  return JointTable(std::move(schema), std::move(cells));
}

Distribution marginal_distribution(const JointTable& j, std::string_view name) {
  const auto idx = j.var_index(name);
  const auto& var = j.schema()[idx];
  Distribution d{var.domain, std::vector<Rational>(var.domain.size())};
  for (const auto& [cell, p] : j.cells()) d.probs[cell[idx]] += p;
  return d;
}

ConditionalTable condition(const JointTable& j, const std::vector<std::string>& targets,
                           const std::vector<std::string>& given) {
  if (targets.empty()) throw DistributionError("condition requires at least one target variable");
  const auto tpos = positions(j, targets);
  const auto gpos = positions(j, given);
  for (auto t : tpos) {
    if (std::find(gpos.begin(), gpos.end(), t) != gpos.end()) {
      throw DistributionError("variable " + j.schema()[t].name + " is both target and given");
    }
  }
  std::set<std::size_t> tset(tpos.begin(), tpos.end()), gset(gpos.begin(), gpos.end());
  if (tset.size() != tpos.size() || gset.size() != gpos.size()) throw DistributionError("repeated variable name");

  ConditionalTable c;
  for (auto t : tpos) c.targets.push_back(j.schema()[t]);
  for (auto g : gpos) c.given.push_back(j.schema()[g]);
  const auto width = cross_size(c.targets);

  std::map<Cell, std::vector<Rational>> mass;
  for (const auto& [cell, p] : j.cells()) {
    auto& row = mass[project(cell, gpos)];
    if (row.empty()) row.resize(width);
    row[flat_index(project(cell, tpos), c.targets)] += p;
  }
  const auto labels = outcome_labels(c.targets);
  for (auto& [gcell, row] : mass) {
    Rational total = 0;
    for (const auto& p : row) total += p;
    for (auto& p : row) p /= total;
    c.rows.push_back({values_of(gcell, c.given), total, Distribution{labels, std::move(row)}});
  }
  return c;
}

JointTable recombine(const ConditionalTable& c, const JointTable& given_marginal) {
  if (given_marginal.schema() != c.given) throw DistributionError("given marginal schema does not match table");

  std::vector<VarSchema> schema = c.targets;
  schema.insert(schema.end(), c.given.begin(), c.given.end());
  std::map<Cell, Rational> cells;
  for (const auto& [gcell, gp] : given_marginal.cells()) {
    const auto* row = c.find(values_of(gcell, c.given));
    if (row == nullptr) throw DistributionError("no conditional row for a positive-probability given assignment");
    for (std::size_t flat = 0; flat < row->dist.probs.size(); ++flat) {
      Cell tcell(c.targets.size());
      auto rest = flat;
      for (std::size_t k = c.targets.size(); k-- > 0;) {
        tcell[k] = rest % c.targets[k].domain.size();
        rest /= c.targets[k].domain.size();
      }
      tcell.insert(tcell.end(), gcell.begin(), gcell.end());
      cells[tcell] += gp * row->dist.probs[flat];
    }
  }
  return JointTable(std::move(schema), std::move(cells));
}

IndependenceResult is_independent(const JointTable& j, std::string_view a, std::string_view b) {
  const auto ia = j.var_index(a);
  const auto ib = j.var_index(b);
  if (ia == ib) throw DistributionError("independence test needs two distinct variables");
  const auto pa = marginal_distribution(j, a);
  const auto pb = marginal_distribution(j, b);
  const auto& da = j.schema()[ia].domain;
  const auto& db = j.schema()[ib].domain;
  std::vector<Rational> joint(da.size() * db.size());
  for (const auto& [cell, p] : j.cells()) joint[cell[ia] * db.size() + cell[ib]] += p;

  IndependenceResult result;
  result.independent = true;
  for (std::size_t x = 0; x < da.size(); ++x) {
    for (std::size_t y = 0; y < db.size(); ++y) {
      const Rational product = pa.probs[x] * pb.probs[y];
      const auto& pxy = joint[x * db.size() + y];
      if (pxy == product) continue;
      result.independent = false;
      const Rational dev = abs(Rational(pxy - product));
      if (!result.witness || dev > result.witness->deviation) {
        result.witness = CellDeviation{da[x], db[y], pxy, product, dev};
      }
    }
  }
  return result;
}

UniformityResult is_uniform_conditional(const ConditionalTable& c) {
  if (c.targets.size() != 1) throw DistributionError("uniformity check needs exactly one target variable");
  const Rational uniform(1, c.targets[0].domain.size());
  for (const auto& row : c.rows) {
    for (const auto& p : row.dist.probs) {
      if (p != uniform) return {false, row};
    }
  }
  return {true, std::nullopt};
}

double mutual_information(const JointTable& j, std::string_view a, std::string_view b) {
  if (is_independent(j, a, b).independent) return 0.0;
  const auto ia = j.var_index(a);
  const auto ib = j.var_index(b);
  const auto pa = marginal_distribution(j, a);
  const auto pb = marginal_distribution(j, b);
  const auto nb = pb.probs.size();
  std::vector<Rational> joint(pa.probs.size() * nb);
  for (const auto& [cell, p] : j.cells()) joint[cell[ia] * nb + cell[ib]] += p;

  // MI = sum_xy P(x)P(y) * g(r - 1) with r = P(x,y) / (P(x)P(y)) and
  // g(d) = (1+d)ln(1+d) - d >= 0. Every term is nonnegative, so a dependent
  // table never cancels to zero.
  double nats = 0.0;
  for (std::size_t x = 0; x < pa.probs.size(); ++x) {
    for (std::size_t y = 0; y < nb; ++y) {
      const Rational product = pa.probs[x] * pb.probs[y];
      if (product == 0) continue;
      const Rational d = joint[x * nb + y] / product - 1;
      nats += product.get_d() * kl_term(d.get_d());
    }
  }
  return nats / std::log(2.0);
}

Rational total_variation(const Distribution& p, const Distribution& q) {
  if (p.outcomes != q.outcomes || p.probs.size() != q.probs.size()) {
    throw DistributionError("total variation requires distributions over the same outcomes");
  }
  Rational sum = 0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) sum += abs(Rational(p.probs[i] - q.probs[i]));
  return sum / 2;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv(const JointTable& j, std::ostream& os) {
  for (const auto& v : j.schema()) os << csv_field(v.name) << ",";
  os << "prob\n";
  for (const auto& [cell, p] : j.cells()) {
    for (std::size_t k = 0; k < cell.size(); ++k) os << csv_field(j.schema()[k].domain[cell[k]]) << ",";
    os << to_string(p) << "\n";
  }
}

}  // namespace pcfgscm
