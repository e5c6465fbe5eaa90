#include "pcfgscm/causal.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace pcfgscm {

const std::vector<Rational>& Mechanism::row(const std::vector<std::string>& parent_values) const {
  auto it = rows.find(parent_values);
  if (it == rows.end()) {
    std::string key;
    for (const auto& v : parent_values) key += (key.empty() ? "'" : ", '") + v + "'";
    throw MissingRowError("mechanism " + name + " has no row for (" + key + ")");
  }
  return it->second;
}

bool Mechanism::reads(std::string_view span) const {
  return std::find(parents.begin(), parents.end(), span) != parents.end();
}

std::vector<std::string> extract_spans(const Pcfg& g, const Derivation& d, const ScmSpec& scm) {
  const auto spans = site_spans(g, d);
  std::vector<std::string> values(scm.spans.size());
  std::vector<std::size_t> begins(scm.spans.size());
  for (std::size_t v = 0; v < scm.spans.size(); ++v) {
    const auto& var = scm.spans[v];
    std::size_t hits = 0;
    for (std::size_t k = 0; k < d.steps.size(); ++k) {
      const auto& lhs = g.production(d.steps[k]).lhs;
      if (std::find(var.nonterminals.begin(), var.nonterminals.end(), lhs) == var.nonterminals.end()) continue;
      if (++hits > 1) throw SpanError("span " + var.name + " occurs more than once in a derivation");
      std::string joined;
      for (auto i = spans[k].begin; i < spans[k].end; ++i) {
        if (!joined.empty()) joined += ' ';
        joined += d.yield[i];
      }
      values[v] = std::move(joined);
      begins[v] = spans[k].begin;
    }
    if (hits == 0) throw SpanError("span " + var.name + " is absent from a derivation");
  }
  for (std::size_t v = 1; v < begins.size(); ++v) {
    if (begins[v] < begins[v - 1]) {
      throw SpanError("span " + scm.spans[v].name + " precedes " + scm.spans[v - 1].name + " in a derivation");
    }
  }
  return values;
}

std::string apply_mechanism(const Mechanism& m, const std::vector<std::string>& parent_values, const Rational& noise) {
  return m.outputs[select_by_threshold(m.row(parent_values), noise)];
}

Model::Model(Pcfg grammar, ScmSpec scm) : grammar_(std::move(grammar)), scm_(std::move(scm)) {
  std::set<std::string> names;
  for (const auto& s : scm_.spans) {
    if (s.name.empty() || !names.insert(s.name).second) throw ModelError("span variable names must be unique and nonempty");
    if (s.nonterminals.empty()) throw ModelError("span " + s.name + " names no nonterminal");
    for (const auto& nt : s.nonterminals) {
      if (!grammar_.is_nonterminal(nt)) throw ModelError("span " + s.name + ": unknown nonterminal " + nt);
    }
  }
  for (const auto& l : scm_.labels) {
    if (l.name.empty() || !names.insert(l.name).second) throw ModelError("label variable names must be unique and nonempty");
  }

  derivations_ = enumerate_derivations(grammar_);
  span_schema_.resize(scm_.spans.size());
  for (std::size_t v = 0; v < scm_.spans.size(); ++v) span_schema_[v].name = scm_.spans[v].name;
  for (const auto& wd : derivations_) {
    auto values = extract_spans(grammar_, wd.derivation, scm_);
    for (std::size_t v = 0; v < values.size(); ++v) {
      auto& dom = span_schema_[v].domain;
      if (std::find(dom.begin(), dom.end(), values[v]) == dom.end()) dom.push_back(values[v]);
    }
    derivation_spans_.push_back(std::move(values));
  }

  for (const auto& l : scm_.labels) {
    const auto& m = l.mechanism;
    if (m.outputs.empty()) throw ModelError("mechanism " + m.name + " has an empty output domain");
    if (std::set<std::string>(m.outputs.begin(), m.outputs.end()).size() != m.outputs.size()) {
      throw ModelError("mechanism " + m.name + " repeats an output value");
    }
    std::vector<std::size_t> parent_pos;
    for (const auto& p : m.parents) {
      if (!has_span(p)) throw ModelError("mechanism " + m.name + " reads undeclared span " + p);
      parent_pos.push_back(span_index(p));
    }
    if (std::set<std::string>(m.parents.begin(), m.parents.end()).size() != m.parents.size()) {
      throw ModelError("mechanism " + m.name + " repeats a parent");
    }
    for (const auto& [key, probs] : m.rows) {
      if (key.size() != m.parents.size()) throw ModelError("mechanism " + m.name + ": row arity mismatch");
      if (probs.size() != m.outputs.size()) throw ModelError("mechanism " + m.name + ": row width mismatch");
      Rational total = 0;
      for (const auto& p : probs) {
        if (p < 0) throw ModelError("mechanism " + m.name + ": negative probability");
        total += p;
      }
      if (total != 1) throw ModelError("mechanism " + m.name + ": row sums to " + to_short_string(total));
    }
    // Interventions can combine any producible parent values, so every
    // combination needs a row.
    std::vector<std::string> key(m.parents.size());
    std::function<void(std::size_t)> cover = [&](std::size_t k) {
      if (k == key.size()) {
        m.row(key);
        return;
      }
      for (const auto& v : span_schema_[parent_pos[k]].domain) {
        key[k] = v;
        cover(k + 1);
      }
    };
    cover(0);
  }
}

std::vector<VarSchema> Model::label_schema() const {
  std::vector<VarSchema> out;
  for (const auto& l : scm_.labels) out.push_back({l.name, l.mechanism.outputs});
  return out;
}

std::size_t Model::span_index(std::string_view name) const {
  for (std::size_t i = 0; i < scm_.spans.size(); ++i) {
    if (scm_.spans[i].name == name) return i;
  }
  throw ModelError("unknown span variable " + std::string(name));
}

std::size_t Model::label_index(std::string_view name) const {
  for (std::size_t i = 0; i < scm_.labels.size(); ++i) {
    if (scm_.labels[i].name == name) return i;
  }
  throw ModelError("unknown label variable " + std::string(name));
}

bool Model::has_span(std::string_view name) const {
  return std::any_of(scm_.spans.begin(), scm_.spans.end(), [&](const SpanVar& s) { return s.name == name; });
}

std::vector<std::string> parent_values(const Model& model, const Mechanism& m, const std::vector<std::string>& spans) {
  std::vector<std::string> out;
  out.reserve(m.parents.size());
  for (const auto& p : m.parents) out.push_back(spans[model.span_index(p)]);
  return out;
}

JointTable model_joint(const Model& model) {
  auto schema = model.span_schema();
  const auto labels = model.label_schema();
  schema.insert(schema.end(), labels.begin(), labels.end());
  const auto n_spans = model.span_schema().size();
  const auto& mechs = model.scm().labels;

  std::map<Cell, Rational> cells;
  for (std::size_t k = 0; k < model.derivations().size(); ++k) {
    const auto& prob = model.derivations()[k].probability;
    if (prob == 0) continue;
    const auto& spans = model.derivation_spans()[k];
    Cell cell(schema.size());
    for (std::size_t v = 0; v < n_spans; ++v) cell[v] = model.span_schema()[v].index_of(spans[v]);

    std::vector<const std::vector<Rational>*> rows;
    for (const auto& l : mechs) rows.push_back(&l.mechanism.row(parent_values(model, l.mechanism, spans)));
    // Label noises are independent, so the label outcome probability factorizes.
    std::function<void(std::size_t, const Rational&)> spread = [&](std::size_t i, const Rational& p) {
      if (i == mechs.size()) {
        cells[cell] += p;
        return;
      }
      for (std::size_t o = 0; o < rows[i]->size(); ++o) {
        if ((*rows[i])[o] == 0) continue;
        cell[n_spans + i] = o;
        spread(i + 1, p * (*rows[i])[o]);
      }
    };
    spread(0, prob);
  }
  return JointTable(std::move(schema), std::move(cells));
}

Unit make_unit(const Model& model, Derivation derivation, std::vector<Rational> noise) {
  const auto& mechs = model.scm().labels;
  if (noise.size() != mechs.size()) throw ModelError("a unit needs one noise value per label mechanism");
  Unit u;
  u.realized.spans = extract_spans(model.grammar(), derivation, model.scm());
  for (std::size_t i = 0; i < mechs.size(); ++i) {
    const auto& m = mechs[i].mechanism;
    u.realized.labels.push_back(apply_mechanism(m, parent_values(model, m, u.realized.spans), noise[i]));
  }
  u.derivation = std::move(derivation);
  u.noise = std::move(noise);
  return u;
}

Unit generate_unit(const Model& model, NoiseStream& noise) {
  auto d = sample_derivation(model.grammar(), noise);
  std::vector<Rational> label_noise;
  label_noise.reserve(model.scm().labels.size());
  for (std::size_t i = 0; i < model.scm().labels.size(); ++i) label_noise.push_back(noise.next());
  return make_unit(model, std::move(d), std::move(label_noise));
}

Assignment counterfactual(const Model& model, const Unit& unit, const Intervention& intervention) {
  if (!model.has_span(intervention.target)) {
    throw ModelError("interventions must target a span variable, got " + intervention.target);
  }
  Assignment out;
  out.spans = unit.realized.spans;
  out.spans[model.span_index(intervention.target)] = intervention.value;
  const auto& mechs = model.scm().labels;
  for (std::size_t i = 0; i < mechs.size(); ++i) {
    const auto& m = mechs[i].mechanism;
    out.labels.push_back(apply_mechanism(m, parent_values(model, m, out.spans), unit.noise[i]));
  }
  return out;
}

namespace {

bool matches(const Model& model, const std::vector<std::string>& spans, const SpanCondition& condition_on) {
  for (const auto& [name, value] : condition_on) {
    if (spans[model.span_index(name)] != value) return false;
  }
  return true;
}

void check_intervention(const Model& model, const Intervention& intervention) {
  if (!model.has_span(intervention.target)) {
    throw ModelError("interventions must target a span variable, got " + intervention.target);
  }
}

// Sorted breakpoints in [0,1) of the cumulative sums of every row in `rows`.
std::vector<Rational> breakpoints(const std::vector<const std::vector<Rational>*>& rows) {
  std::vector<Rational> points{Rational(0)};
  for (const auto* row : rows) {
    Rational c = 0;
    for (const auto& p : *row) {
      c += p;
      if (c < 1) points.push_back(c);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace

Distribution interventional_distribution(const Model& model, const Intervention& intervention, std::string_view label,
                                         const SpanCondition& condition_on) {
  check_intervention(model, intervention);
  const auto& mech = model.scm().labels[model.label_index(label)].mechanism;
  for (const auto& [name, value] : condition_on) model.span_index(name);

  std::vector<std::string> span_names;
  for (const auto& v : model.span_schema()) span_names.push_back(v.name);
  const auto spans_joint = marginalize(model_joint(model), span_names);
  const auto target = model.span_index(intervention.target);

  Distribution out{mech.outputs, std::vector<Rational>(mech.outputs.size())};
  Rational mass = 0;
  for (const auto& [cell, p] : spans_joint.cells()) {
    std::vector<std::string> clamped(cell.size());
    for (std::size_t v = 0; v < cell.size(); ++v) clamped[v] = spans_joint.schema()[v].domain[cell[v]];
    clamped[target] = intervention.value;
    if (!matches(model, clamped, condition_on)) continue;
    mass += p;
    const auto& row = mech.row(parent_values(model, mech, clamped));
    for (std::size_t o = 0; o < row.size(); ++o) out.probs[o] += p * row[o];
  }
  if (mass == 0) throw ModelError("conditioning set has zero probability after the intervention");
  for (auto& p : out.probs) p /= mass;
  return out;
}

std::vector<CounterfactualRow> counterfactual_table(const Model& model, const Intervention& intervention) {
  check_intervention(model, intervention);
  const auto& mechs = model.scm().labels;
  std::vector<CounterfactualRow> table;
  for (std::size_t k = 0; k < model.derivations().size(); ++k) {
    const auto& wd = model.derivations()[k];
    if (wd.probability == 0) continue;
    auto cf_spans = model.derivation_spans()[k];
    cf_spans[model.span_index(intervention.target)] = intervention.value;

    // Per mechanism, the cells between consecutive breakpoints of the factual
    // and intervened rows; outputs are constant on each cell.
    std::vector<std::vector<Rational>> cuts;
    for (const auto& l : mechs) {
      const auto& m = l.mechanism;
      auto points = breakpoints({&m.row(parent_values(model, m, model.derivation_spans()[k])),
                                 &m.row(parent_values(model, m, cf_spans))});
      points.push_back(Rational(1));
      cuts.push_back(std::move(points));
    }
    std::vector<Rational> noise(mechs.size());
    std::function<void(std::size_t, const Rational&)> walk = [&](std::size_t i, const Rational& weight) {
      if (i == mechs.size()) {
        CounterfactualRow row;
        row.derivation_index = k;
        row.weight = weight;
        row.unit = make_unit(model, wd.derivation, noise);
        row.counterfactual = counterfactual(model, row.unit, intervention);
        table.push_back(std::move(row));
        return;
      }
      for (std::size_t c = 0; c + 1 < cuts[i].size(); ++c) {
        noise[i] = cuts[i][c];
        walk(i + 1, weight * (cuts[i][c + 1] - cuts[i][c]));
      }
    };
    walk(0, wd.probability);
  }
  return table;
}

Distribution interventional_distribution_by_units(const Model& model, const Intervention& intervention,
                                                  std::string_view label, const SpanCondition& condition_on) {
  const auto li = model.label_index(label);
  for (const auto& [name, value] : condition_on) model.span_index(name);
  const auto& outputs = model.scm().labels[li].mechanism.outputs;
  Distribution out{outputs, std::vector<Rational>(outputs.size())};
  Rational mass = 0;
  for (const auto& row : counterfactual_table(model, intervention)) {
    if (!matches(model, row.counterfactual.spans, condition_on)) continue;
    mass += row.weight;
    const auto& value = row.counterfactual.labels[li];
    const auto pos = std::find(outputs.begin(), outputs.end(), value) - outputs.begin();
    out.probs[pos] += row.weight;
  }
  if (mass == 0) throw ModelError("conditioning set has zero probability after the intervention");
  for (auto& p : out.probs) p /= mass;
  return out;
}

CiResult is_counterfactually_invariant(const Model& model, std::string_view feature, std::string_view label,
                                       const std::vector<std::string>& extra_values) {
  const auto fi = model.span_index(feature);
  const auto li = model.label_index(label);
  const auto& mech = model.scm().labels[li].mechanism;

  auto values = model.span_schema()[fi].domain;
  for (const auto& v : extra_values) {
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  if (!mech.reads(feature)) return {};

  for (std::size_t k = 0; k < model.derivations().size(); ++k) {
    if (model.derivations()[k].probability == 0) continue;
    const auto& spans = model.derivation_spans()[k];
    const auto& factual_row = mech.row(parent_values(model, mech, spans));
    for (const auto& v : values) {
      auto cf_spans = spans;
      cf_spans[fi] = v;
      const auto& cf_row = mech.row(parent_values(model, mech, cf_spans));
      if (cf_row == factual_row) continue;

      // Rows differ, so some noise cell selects different outputs.
      for (const auto& u : breakpoints({&factual_row, &cf_row})) {
        if (select_by_threshold(factual_row, u) == select_by_threshold(cf_row, u)) continue;
        std::vector<Rational> noise(model.scm().labels.size());
        noise[li] = u;
        CiWitness w;
        w.unit = make_unit(model, model.derivations()[k].derivation, std::move(noise));
        w.intervention = {std::string(feature), v};
        w.factual_label = w.unit.realized.labels[li];
        w.counterfactual_label = counterfactual(model, w.unit, w.intervention).labels[li];
        return {false, std::move(w)};
      }
    }
  }
  return {};
}

}  // namespace pcfgscm
