#include "pcfgscm/audit.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace pcfgscm {

namespace {

std::vector<WitnessPair> pairs_from(const ConditionalTable& c) {
  std::vector<WitnessPair> out;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    for (std::size_t k = i + 1; k < c.rows.size(); ++k) {
      auto tv = total_variation(c.rows[i].dist, c.rows[k].dist);
      if (tv != 0) out.push_back({c.rows[i].given[0], c.rows[k].given[0], std::move(tv)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const WitnessPair& a, const WitnessPair& b) { return a.tv > b.tv; });
  return out;
}

template <typename F>
void for_each_pair(const Model& model, F&& f) {
  for (const auto& l : model.scm().labels) {
    for (const auto& s : model.scm().spans) f(s.name, l.name);
  }
}

UifVerdict verdict_from(const JointTable& j, const std::string& feature, const std::string& label,
                        UifDefinition definition) {
  UifVerdict v;
  v.feature = feature;
  v.label = label;
  v.definition = definition;
  const auto c = condition(j, {label}, {feature});
  const auto pairs = pairs_from(c);
  v.max_tv = pairs.empty() ? Rational(0) : pairs.front().tv;
  v.mi_bits = mutual_information(j, feature, label);
  if (definition == UifDefinition::independence) {
    v.satisfied = is_independent(j, feature, label).independent;
  } else {
    auto u = is_uniform_conditional(c);
    v.satisfied = u.uniform;
    v.nonuniform_row = std::move(u.witness);
  }
  if (!v.satisfied && !pairs.empty()) v.witness_pair = pairs.front();
  return v;
}

Rational parse_grid_number(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return parse_rational(text);
  // Terminating decimal: digits '.' digits, optional sign. Converted exactly.
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  const auto d = body.find('.');
  const auto whole = body.substr(0, d);
  const auto frac = body.substr(d + 1);
  auto digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || frac.empty()) {
    throw std::invalid_argument("not a grid number: '" + std::string(text) + "'");
  }
  mpz_class num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational r(num, den);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace

std::string_view to_string(UifDefinition d) {
  return d == UifDefinition::independence ? "independence" : "uniformity";
}

std::vector<UifVerdict> uif_report(const Model& model, UifDefinition definition) {
  const auto j = model_joint(model);
  std::vector<UifVerdict> out;
  for_each_pair(model, [&](const std::string& f, const std::string& l) { out.push_back(verdict_from(j, f, l, definition)); });
  return out;
}

std::vector<WitnessPair> uif_witness_pairs(const Model& model, std::string_view feature, std::string_view label) {
  const auto c = condition(model_joint(model), {std::string(label)}, {std::string(feature)});
  if (c.rows.size() < 2) {
    throw DistributionError("feature " + std::string(feature) + " has fewer than two positive-probability values");
  }
  return pairs_from(c);
}

std::vector<CiVerdict> ci_report(const Model& model) {
  std::vector<CiVerdict> out;
  for_each_pair(model, [&](const std::string& f, const std::string& l) {
    auto r = is_counterfactually_invariant(model, f, l);
    out.push_back({f, l, r.invariant, std::move(r.witness)});
  });
  return out;
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::causal_informative:
      return "causal-informative";
    case Quadrant::spurious_in_causal_sense:
      return "spurious-in-causal-sense";
    case Quadrant::hidden_causal:
      return "hidden-causal";
    case Quadrant::fully_clean:
      return "fully-clean";
  }
  return "?";
}

Quadrant classify(bool uif, bool ci) {
  if (uif) return ci ? Quadrant::fully_clean : Quadrant::hidden_causal;
  return ci ? Quadrant::spurious_in_causal_sense : Quadrant::causal_informative;
}

const QuadrantEntry* QuadrantReport::find(std::string_view feature, std::string_view label) const {
  for (const auto& e : entries) {
    if (e.feature == feature && e.label == label) return &e;
  }
  return nullptr;
}

QuadrantReport quadrant_report(const Model& model) {
  const auto uif = uif_report(model, UifDefinition::independence);
  const auto ci = ci_report(model);
  QuadrantReport r;
  for (std::size_t i = 0; i < uif.size(); ++i) {
    r.entries.push_back({uif[i].feature, uif[i].label, uif[i].satisfied, ci[i].invariant,
                         classify(uif[i].satisfied, ci[i].invariant)});
  }
  return r;
}

std::vector<SweepRow> sweep(const std::vector<Rational>& alphas, const std::vector<Rational>& beta_plus,
                            const std::vector<Rational>& beta_minus, const PaperLexicon& lexicon) {
  std::vector<SweepRow> rows;
  for (const auto& a : alphas) {
    for (const auto& bp : beta_plus) {
      for (const auto& bm : beta_minus) {
        SweepRow row;
        row.params = {a, bp, bm};
        row.nondegenerate = lexicon.disjoint();
        const auto model = make_paper_model(row.params, lexicon).model;
        const auto j = model_joint(model);
        const struct {
          const char* feature;
          const char* label;
          bool uif;
          bool ci;
        } predictions[] = {
            {"X1", "Y", a == 0, true},
            {"X2", "Y", bp == bm, false},
            {"X3", "Y", bp == 1 - bm, false},
            {"X1", "Z", false, false},
        };
        for (const auto& p : predictions) {
          const auto v = verdict_from(j, p.feature, p.label, UifDefinition::independence);
          SweepPair pair{p.feature, p.label, v.satisfied, p.uif, is_counterfactually_invariant(model, p.feature, p.label).invariant,
                         p.ci, v.max_tv, v.mi_bits};
          const bool uif_ok = row.nondegenerate ? pair.uif == pair.uif_predicted : (!pair.uif_predicted || pair.uif);
          row.match = row.match && uif_ok && pair.ci == pair.ci_predicted;
          row.pairs.push_back(std::move(pair));
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<Rational> parse_grid(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) return {parse_grid_number(text)};
  const auto lo = parse_grid_number(text.substr(0, dots));
  const auto rest = text.substr(dots + 2);

  // hi/step, where hi and step may themselves be fractions: accept the unique
  // slash that splits `rest` into two valid numbers.
  std::vector<std::pair<Rational, Rational>> splits;
  for (auto pos = rest.find('/'); pos != std::string_view::npos; pos = rest.find('/', pos + 1)) {
    try {
      splits.emplace_back(parse_grid_number(rest.substr(0, pos)), parse_grid_number(rest.substr(pos + 1)));
    } catch (const std::invalid_argument&) {
    }
  }
  if (splits.empty()) throw std::invalid_argument("grid must look like lo..hi/step, got '" + std::string(text) + "'");
  if (splits.size() > 1) {
    throw std::invalid_argument("ambiguous grid '" + std::string(text) + "'; write the step as a decimal");
  }
  const auto& [hi, step] = splits.front();
  if (step <= 0) throw std::invalid_argument("grid step must be positive");
  if (hi < lo) throw std::invalid_argument("grid upper bound is below the lower bound");
  std::vector<Rational> out;
  for (Rational x = lo; x <= hi; x += step) out.push_back(x);
  return out;
}

std::vector<Assignment> generate_dataset(const Model& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("dataset size must be at least 1");
  auto noise = NoiseStream::seeded(seed);
  std::vector<Assignment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_unit(model, noise).realized);
  return out;
}

std::string field_name(std::string_view variable) {
  std::string out(variable);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void write_jsonl(const Model& model, const std::vector<Assignment>& records, std::ostream& os) {
  std::vector<std::string> keys;
  for (const auto& s : model.scm().spans) keys.push_back(field_name(s.name));
  for (const auto& l : model.scm().labels) keys.push_back(field_name(l.name));
  if (std::set<std::string>(keys.begin(), keys.end()).size() != keys.size()) {
    throw ModelError("variable names collide once lowercased; cannot name dataset fields");
  }
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    std::size_t k = 0;
    for (const auto& v : r.spans) obj[keys[k++]] = v;
    for (const auto& v : r.labels) obj[keys[k++]] = v;
    os << obj.dump() << '\n';
  }
}

}  // namespace pcfgscm
