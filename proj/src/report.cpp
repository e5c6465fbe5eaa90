#include "pcfgscm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace pcfgscm {

using nlohmann::ordered_json;

namespace {

constexpr const char* kCiNote =
    "mechanism rows are compared under a shared inverse-CDF noise coupling; invariant means equal output for every noise value";
constexpr const char* kConditioningNote = "conditioning sets are applied after the intervention";

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string general(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> rationals(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

ordered_json info_json(const ModelInfo& info) {
  ordered_json j;
  j["source"] = info.source;
  if (info.params) {
    j["alpha"] = to_string(info.params->alpha);
    j["beta_plus"] = to_string(info.params->beta_plus);
    j["beta_minus"] = to_string(info.params->beta_minus);
  }
  return j;
}

std::string info_text(const ModelInfo& info) {
  std::string out = "model: " + info.source;
  if (info.params) {
    out += " (alpha=" + to_short_string(info.params->alpha) + ", beta+=" + to_short_string(info.params->beta_plus) +
           ", beta-=" + to_short_string(info.params->beta_minus) + ")";
  }
  return out + "\n";
}

ordered_json unit_json(const Model& model, const Unit& u) {
  ordered_json j = ordered_json::object();
  for (std::size_t v = 0; v < u.realized.spans.size(); ++v) j[model.scm().spans[v].name] = u.realized.spans[v];
  for (std::size_t l = 0; l < u.realized.labels.size(); ++l) j[model.scm().labels[l].name] = u.realized.labels[l];
  j["noise"] = rationals(u.noise);
  return j;
}

std::string unit_text(const Unit& u) {
  return "(" + join(u.realized.spans, ", ") + "; " + join(u.realized.labels, ", ") + ")";
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "text") return Format::text;
  if (name == "csv") return Format::csv;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

std::string text_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out += cells[c];
      if (c + 1 < cells.size()) out += std::string(width[c] - cells[c].size() + 2, ' ');
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  out += line(rule);
  for (const auto& r : rows) out += line(r);
  return out;
}

void render_exact(const Model& model, const ModelInfo& info, Format format, std::ostream& os) {
  const auto joint = model_joint(model);
  if (format == Format::csv) {
    write_csv(joint, os);
    return;
  }
  const auto uif_ind = uif_report(model, UifDefinition::independence);
  const auto uif_uni = uif_report(model, UifDefinition::uniformity);
  const auto ci = ci_report(model);
  const auto quad = quadrant_report(model);

  std::vector<std::vector<WitnessPair>> pairs;
  for (const auto& v : uif_ind) {
    const bool enough = condition(joint, {v.label}, {v.feature}).rows.size() >= 2;
    pairs.push_back(enough ? uif_witness_pairs(model, v.feature, v.label) : std::vector<WitnessPair>{});
  }

  if (format == Format::json) {
    ordered_json j;
    j["model"] = info_json(info);
    j["notes"] = {{"mi_units", "bits"}, {"ci", kCiNote}, {"conditioning", kConditioningNote}};

    ordered_json jt;
    for (const auto& v : joint.schema()) jt["variables"].push_back({{"name", v.name}, {"domain", v.domain}});
    jt["cells"] = ordered_json::array();
    for (const auto& [cell, p] : joint.cells()) {
      ordered_json c = ordered_json::object();
      for (std::size_t v = 0; v < cell.size(); ++v) c[joint.schema()[v].name] = joint.schema()[v].domain[cell[v]];
      c["prob"] = to_string(p);
      jt["cells"].push_back(c);
    }
    j["joint"] = jt;

    auto uif_json = [&](const std::vector<UifVerdict>& vs, bool with_pairs) {
      ordered_json arr = ordered_json::array();
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const auto& v = vs[i];
        ordered_json e;
        e["feature"] = v.feature;
        e["label"] = v.label;
        e["definition"] = std::string(to_string(v.definition));
        e["satisfied"] = v.satisfied;
        e["mi_bits"] = v.mi_bits;
        e["max_tv"] = to_string(v.max_tv);
        if (v.witness_pair) {
          e["witness_pair"] = {{"x", v.witness_pair->x}, {"x_prime", v.witness_pair->x_prime},
                               {"tv", to_string(v.witness_pair->tv)}};
        } else {
          e["witness_pair"] = nullptr;
        }
        if (v.nonuniform_row) {
          e["nonuniform_row"] = {{"given", v.nonuniform_row->given},
                                 {"outcomes", v.nonuniform_row->dist.outcomes},
                                 {"probs", rationals(v.nonuniform_row->dist.probs)}};
        }
        if (with_pairs) {
          e["pairs"] = ordered_json::array();
          for (const auto& p : pairs[i]) e["pairs"].push_back({{"x", p.x}, {"x_prime", p.x_prime}, {"tv", to_string(p.tv)}});
        }
        arr.push_back(e);
      }
      return arr;
    };
    j["uif_independence"] = uif_json(uif_ind, true);
    j["uif_uniformity"] = uif_json(uif_uni, false);

    ordered_json cij = ordered_json::array();
    for (const auto& v : ci) {
      ordered_json e;
      e["feature"] = v.feature;
      e["label"] = v.label;
      e["invariant"] = v.invariant;
      if (v.witness) {
        e["witness"] = {{"unit", unit_json(model, v.witness->unit)},
                        {"intervention", {{"target", v.witness->intervention.target},
                                          {"value", v.witness->intervention.value}}},
                        {"factual", v.witness->factual_label},
                        {"counterfactual", v.witness->counterfactual_label}};
      } else {
        e["witness"] = nullptr;
      }
      cij.push_back(e);
    }
    j["ci"] = cij;

    ordered_json qj = ordered_json::array();
    for (const auto& e : quad.entries) {
      qj.push_back({{"feature", e.feature}, {"label", e.label}, {"uif", e.uif}, {"ci", e.ci},
                    {"class", std::string(to_string(e.quadrant))}});
    }
    j["quadrant"] = qj;
    os << j.dump(2) << '\n';
    return;
  }

  os << info_text(info) << "mutual information in bits; " << kConditioningNote << "\n\n";

  os << "joint distribution\n";
  {
    std::vector<std::string> header;
    for (const auto& v : joint.schema()) header.push_back(v.name);
    header.push_back("prob");
    std::vector<std::vector<std::string>> rows;
    for (const auto& [cell, p] : joint.cells()) {
      std::vector<std::string> r;
      for (std::size_t v = 0; v < cell.size(); ++v) r.push_back(joint.schema()[v].domain[cell[v]]);
      r.push_back(to_short_string(p));
      rows.push_back(std::move(r));
    }
    os << text_table(header, rows);
  }

  os << "\nUIF (independence and uniformity)\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < uif_ind.size(); ++i) {
      const auto& v = uif_ind[i];
      std::string witness = "-";
      if (v.witness_pair) {
        witness = v.witness_pair->x + " vs " + v.witness_pair->x_prime + " (TV " + to_short_string(v.witness_pair->tv) + ")";
      }
      rows.push_back({v.feature, v.label, yes_no(v.satisfied), yes_no(uif_uni[i].satisfied), fixed(v.mi_bits),
                      to_short_string(v.max_tv), witness});
    }
    os << text_table({"feature", "label", "independent", "uniform", "mi_bits", "max_tv", "top witness pair"}, rows);
  }

  os << "\ncounterfactual invariance\n" << kCiNote << "\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : ci) {
      std::string witness = "-";
      if (v.witness) {
        witness = unit_text(v.witness->unit) + " do(" + v.witness->intervention.target + " := " +
                  v.witness->intervention.value + "): " + v.witness->factual_label + " -> " +
                  v.witness->counterfactual_label;
      }
      rows.push_back({v.feature, v.label, yes_no(v.invariant), witness});
    }
    os << text_table({"feature", "label", "invariant", "witness"}, rows);
  }

  os << "\nquadrants\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : quad.entries) {
      rows.push_back({e.feature, e.label, yes_no(e.uif), yes_no(e.ci), std::string(to_string(e.quadrant))});
    }
    os << text_table({"feature", "label", "UIF", "CI", "class"}, rows);
  }
}

void render_sweep(const std::vector<SweepRow>& rows, Format format, std::ostream& os) {
  if (format == Format::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json e;
      e["alpha"] = to_string(r.params.alpha);
      e["beta_plus"] = to_string(r.params.beta_plus);
      e["beta_minus"] = to_string(r.params.beta_minus);
      for (const auto& p : r.pairs) {
        e["pairs"].push_back({{"feature", p.feature},
                              {"label", p.label},
                              {"uif", p.uif},
                              {"uif_predicted", p.uif_predicted},
                              {"ci", p.ci},
                              {"ci_predicted", p.ci_predicted},
                              {"max_tv", to_string(p.max_tv)},
                              {"mi_bits", p.mi_bits}});
      }
      e["nondegenerate"] = r.nondegenerate;
      e["match"] = r.match;
      arr.push_back(e);
    }
    os << arr.dump(2) << '\n';
    return;
  }

  std::vector<std::string> header{"alpha", "beta_plus", "beta_minus"};
  if (format == Format::csv) header.insert(header.end(), {"alpha_f", "beta_plus_f", "beta_minus_f"});
  if (!rows.empty()) {
    for (const auto& p : rows.front().pairs) {
      const auto pre = p.feature + "_" + p.label + "_";
      header.insert(header.end(), {pre + "uif", pre + "uif_pred", pre + "ci", pre + "ci_pred", pre + "max_tv",
                                   pre + "mi_bits"});
    }
  }
  header.insert(header.end(), {"nondegenerate", "match"});

  const auto flag = [&](bool b) { return std::string(format == Format::csv ? (b ? "true" : "false") : yes_no(b)); };
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    std::vector<std::string> cells;
    if (format == Format::csv) {
      cells = {to_string(r.params.alpha), to_string(r.params.beta_plus), to_string(r.params.beta_minus),
               general(to_double(r.params.alpha)), general(to_double(r.params.beta_plus)),
               general(to_double(r.params.beta_minus))};
    } else {
      cells = {to_short_string(r.params.alpha), to_short_string(r.params.beta_plus),
               to_short_string(r.params.beta_minus)};
    }
    for (const auto& p : r.pairs) {
      cells.insert(cells.end(), {flag(p.uif), flag(p.uif_predicted), flag(p.ci), flag(p.ci_predicted),
                                 format == Format::csv ? to_string(p.max_tv) : to_short_string(p.max_tv),
                                 fixed(p.mi_bits)});
    }
    cells.push_back(flag(r.nondegenerate));
    cells.push_back(flag(r.match));
    table.push_back(std::move(cells));
  }

  if (format == Format::csv) {
    os << join(header, ",") << '\n';
    for (const auto& r : table) os << join(r, ",") << '\n';
  } else {
    os << "UIF = exact independence; mutual information in bits\n" << text_table(header, table);
  }
}

void render_empirical(const std::vector<EmpiricalVerdict>& verdicts, Format format, std::ostream& os) {
  if (format == Format::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : verdicts) {
      const auto& t = v.test;
      ordered_json e;
      e["feature"] = v.feature;
      e["label"] = v.label;
      e["n"] = t.n;
      e["feature_values"] = t.row_values;
      e["label_values"] = t.col_values;
      e["counts"] = t.counts;
      e["chi_square"] = t.chi_square;
      e["dof"] = t.dof;
      e["p_value"] = t.p_value;
      e["mi_bits"] = t.mi_bits;
      e["min_expected"] = t.min_expected;
      e["low_expected_warning"] = t.low_expected;
      arr.push_back(e);
    }
    os << arr.dump(2) << '\n';
    return;
  }
  const std::vector<std::string> header{"feature", "label", "n", "chi_square", "dof", "p_value", "mi_bits",
                                        "min_expected", "low_expected"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& v : verdicts) {
    const auto& t = v.test;
    rows.push_back({v.feature, v.label, std::to_string(t.n), fixed(t.chi_square, 4), std::to_string(t.dof),
                    general(t.p_value), fixed(t.mi_bits), fixed(t.min_expected, 2),
                    format == Format::csv ? (t.low_expected ? "true" : "false") : yes_no(t.low_expected)});
  }
  if (format == Format::csv) {
    os << join(header, ",") << '\n';
    for (auto& r : rows) {
      for (auto& c : r) c = csv_field(c);
      os << join(r, ",") << '\n';
    }
    return;
  }
  os << "Pearson chi-square test of independence; mutual information in bits\n" << text_table(header, rows);
  for (const auto& v : verdicts) {
    os << "\ncounts " << v.feature << " x " << v.label << "\n";
    std::vector<std::string> h{v.feature};
    h.insert(h.end(), v.test.col_values.begin(), v.test.col_values.end());
    std::vector<std::vector<std::string>> cr;
    for (std::size_t i = 0; i < v.test.row_values.size(); ++i) {
      std::vector<std::string> r{v.test.row_values[i]};
      for (auto c : v.test.counts[i]) r.push_back(std::to_string(c));
      cr.push_back(std::move(r));
    }
    os << text_table(h, cr);
    if (v.test.low_expected) os << "warning: an expected count is below 5; the chi-square approximation is unreliable\n";
  }
}

void render_counterfactual(const Model& model, const ModelInfo& info, const Intervention& intervention,
                           const std::vector<CounterfactualRow>& rows, Format format, std::ostream& os) {
  const auto& spans = model.scm().spans;
  const auto& labels = model.scm().labels;

  if (format == Format::json) {
    ordered_json j;
    j["model"] = info_json(info);
    j["intervention"] = {{"target", intervention.target}, {"value", intervention.value}};
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json cf = ordered_json::object();
      for (std::size_t v = 0; v < spans.size(); ++v) cf[spans[v].name] = r.counterfactual.spans[v];
      for (std::size_t l = 0; l < labels.size(); ++l) cf[labels[l].name] = r.counterfactual.labels[l];
      j["rows"].push_back({{"weight", to_string(r.weight)}, {"factual", unit_json(model, r.unit)}, {"counterfactual", cf}});
    }
    os << j.dump(2) << '\n';
    return;
  }

  std::vector<std::string> header{"weight"};
  for (const auto& s : spans) header.push_back(s.name);
  for (const auto& l : labels) header.push_back(l.name);
  for (const auto& l : labels) header.push_back("u_" + l.name);
  for (const auto& s : spans) header.push_back("cf_" + s.name);
  for (const auto& l : labels) header.push_back("cf_" + l.name);

  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    std::vector<std::string> cells{format == Format::csv ? to_string(r.weight) : to_short_string(r.weight)};
    for (const auto& v : r.unit.realized.spans) cells.push_back(v);
    for (const auto& v : r.unit.realized.labels) cells.push_back(v);
    for (const auto& u : r.unit.noise) cells.push_back(format == Format::csv ? to_string(u) : to_short_string(u));
    for (const auto& v : r.counterfactual.spans) cells.push_back(v);
    for (const auto& v : r.counterfactual.labels) cells.push_back(v);
    table.push_back(std::move(cells));
  }

  if (format == Format::csv) {
    os << join(header, ",") << '\n';
    for (auto& r : table) {
      for (auto& c : r) c = csv_field(c);
      os << join(r, ",") << '\n';
    }
    return;
  }
  os << info_text(info) << "do(" << intervention.target << " := " << intervention.value
     << "); each row is a noise box, u_* its lower corner\n"
     << text_table(header, table);
}

}  // namespace pcfgscm
