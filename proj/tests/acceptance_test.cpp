// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pcfgscm/audit.hpp"
#include "pcfgscm/empirical.hpp"

using namespace pcfgscm;

namespace {

// Collects the first few failure messages of a criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (messages_.size() < 5) messages_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    std::string s = std::to_string(failures_) + " failed check(s)";
    for (const auto& m : messages_) s += "\n    " + m;
    return s;
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> messages_;
};

const Rational kHalf(1, 2);
const std::vector<Rational> kAlphas{-1, Rational(-1, 2), 0, kHalf, 1};
const std::vector<Rational> kBetas{0, Rational(1, 4), kHalf, Rational(3, 4), 1};

std::string str(const Rational& r) { return r.get_str(); }

std::string params_str(const Rational& a, const Rational& bp, const Rational& bm) {
  return "(" + str(a) + ", " + str(bp) + ", " + str(bm) + ")";
}

template <typename F>
void for_grid(F&& f) {
  for (const auto& a : kAlphas) {
    for (const auto& bp : kBetas) {
      for (const auto& bm : kBetas) f(a, bp, bm);
    }
  }
}

Model paper(const Rational& a, const Rational& bp, const Rational& bm) { return make_paper_model({a, bp, bm}).model; }

// Joint table as value rows, for comparison with the oracles.
oracle::Joint rows_of(const JointTable& j) {
  oracle::Joint out;
  for (const auto& [cell, p] : j.cells()) {
    oracle::Row r;
    for (std::size_t v = 0; v < cell.size(); ++v) r.push_back(j.schema()[v].domain[cell[v]]);
    out[r] = p;
  }
  return out;
}

// 1. Target/sentiment confounding at alpha = 1/2.
void confounding(Checker& c) {
  const auto m = paper(kHalf, kHalf, kHalf);
  const auto j = model_joint(m);
  const auto y_given_x1 = condition(j, {"Y"}, {"X1"});
  const auto row = y_given_x1.find({"the pizza"});
  c.expect(row && row->dist.prob("Pos") == Rational(3, 4), "P(Y=Pos | X1=the pizza) != 3/4");
  c.expect(oracle::conditional(oracle::paper_joint(kHalf, kHalf, kHalf), 0, "the pizza", 3, "Pos") == Rational(3, 4),
           "oracle P(Y=Pos | X1=the pizza) != 3/4");
  c.expect(!is_independent(j, "X1", "Y").independent, "(X1,Y) independent");
  const auto pairs = uif_witness_pairs(m, "X1", "Y");
  c.expect(!pairs.empty() && pairs.front().tv == kHalf, "top witness-pair TV != 1/2");
  c.expect(is_counterfactually_invariant(m, "X1", "Y").invariant, "CI(X1 -> Y) not invariant");
  const auto q = quadrant_report(m).find("X1", "Y");
  c.expect(q && q->quadrant == Quadrant::spurious_in_causal_sense, "(X1,Y) not in the not-UIF and CI quadrant");
}

// 2. Independence and uniformity without counterfactual invariance at alpha = 0.
void uif_without_ci(Checker& c) {
  const auto m = paper(0, kHalf, kHalf);
  const auto j = model_joint(m);
  const auto oj = oracle::paper_joint(0, kHalf, kHalf);
  for (std::size_t f = 0; f < 3; ++f) {
    const std::string x = "X" + std::to_string(f + 1);
    c.expect(is_independent(j, x, "Y").independent, x + " not independent of Y");
    c.expect(oracle::independent(oj, f, 3), x + " not independent of Y by oracle");
    c.expect(is_uniform_conditional(condition(j, {"Y"}, {x})).uniform, "P(Y | " + x + ") not uniform");
  }

  struct Expected {
    const char* feature;
    std::vector<std::string> flip;  // the two values the witness must swap between
  };
  for (const auto& e : {Expected{"X2", {"was", "was not"}}, Expected{"X3", {"delicious", "greasy"}}}) {
    const auto r = is_counterfactually_invariant(m, e.feature, "Y");
    c.expect(!r.invariant && r.witness, std::string("CI(") + e.feature + " -> Y) reported invariant");
    if (!r.witness) continue;
    const auto& w = *r.witness;
    const auto v = m.span_index(e.feature);
    const auto& factual = w.unit.realized.spans[v];
    c.expect(w.intervention.target == e.feature, "witness intervenes on the wrong variable");
    c.expect(factual != w.intervention.value && (factual == e.flip[0] || factual == e.flip[1]) &&
                 (w.intervention.value == e.flip[0] || w.intervention.value == e.flip[1]),
             std::string("witness for ") + e.feature + " is not a " + e.flip[0] + "/" + e.flip[1] + " flip");
    // Replay the witness by abduction, action and prediction.
    const auto cf = counterfactual(m, w.unit, w.intervention);
    const auto y = m.label_index("Y");
    c.expect(w.unit.realized.labels[y] == w.factual_label && cf.labels[y] == w.counterfactual_label &&
                 w.factual_label != w.counterfactual_label,
             std::string("witness for ") + e.feature + " does not replay");
  }
}

// 3. Closed-form sweep over the 125-point grid.
void sweep_grid(Checker& c) {
  const auto rows = sweep(kAlphas, kBetas, kBetas);
  c.expect(rows.size() == 125, "grid has " + std::to_string(rows.size()) + " rows");
  if (rows.empty()) return;
  const std::size_t cols[][2] = {{0, 3}, {1, 3}, {2, 3}, {0, 4}};
  for (const auto& r : rows) {
    const auto& p = r.params;
    const auto at = params_str(p.alpha, p.beta_plus, p.beta_minus);
    c.expect(r.match && r.nondegenerate, "row " + at + " does not match");
    const bool predicted[] = {p.alpha == 0, p.beta_plus == p.beta_minus, p.beta_plus == 1 - p.beta_minus, false};
    const auto oj = oracle::paper_joint(p.alpha, p.beta_plus, p.beta_minus);
    for (std::size_t k = 0; k < 4; ++k) {
      c.expect(r.pairs[k].uif == predicted[k], "independence verdict differs from closed form at " + at);
      c.expect(oracle::independent(oj, cols[k][0], cols[k][1]) == predicted[k],
               "oracle independence differs from closed form at " + at);
      c.expect(r.pairs[k].ci == rows.front().pairs[k].ci, "CI verdict changes at " + at);
    }
  }
}

// 4. Interventions cut the confounding path.
void intervention_soundness(Checker& c) {
  for_grid([&](const Rational& a, const Rational& bp, const Rational& bm) {
    const auto at = params_str(a, bp, bm);
    const auto m = paper(a, bp, bm);
    const auto j = model_joint(m);
    const auto pz = marginal_distribution(j, "Z");
    const auto py = marginal_distribution(j, "Y");
    for (const auto& x : m.span_schema()[m.span_index("X2")].domain) {
      c.expect(interventional_distribution(m, {"X2", x}, "Z") == pz, "P(Z | do(X2)) != P(Z) at " + at);
    }
    for (const auto& x : m.span_schema()[m.span_index("X1")].domain) {
      c.expect(interventional_distribution(m, {"X1", x}, "Y") == py, "P(Y | do(X1)) != P(Y) at " + at);
    }

    // Gap between conditioning and intervening, from the enumeration oracle.
    const auto oj = oracle::paper_joint(a, bp, bm);
    const auto cond_pos = oracle::conditional(oj, 0, "the pizza", 3, "Pos");
    const auto cond_neg = oracle::conditional(oj, 0, "the pizza", 3, "Neg");
    const auto did = interventional_distribution(m, {"X1", "the pizza"}, "Y");
    const Rational gap = (abs(cond_pos - did.prob("Pos")) + abs(cond_neg - did.prob("Neg"))) / 2;
    c.expect(gap == abs(a) / 2, "do/condition gap " + str(gap) + " != |alpha|/2 at " + at);
    c.expect((a != 0) == (gap != 0), "do and condition agree with alpha != 0 at " + at);
    const auto y_given_x1 = condition(j, {"Y"}, {"X1"});
    const auto row = y_given_x1.find({"the pizza"});
    c.expect(row && total_variation(row->dist, did) == gap, "library TV differs from oracle gap at " + at);
  });
}

// 5. Truncated factorization against counterfactual aggregation.
void two_routes(Checker& c) {
  std::size_t compared = 0;
  for_grid([&](const Rational& a, const Rational& bp, const Rational& bm) {
    const auto m = paper(a, bp, bm);
    for (const auto& span : m.span_schema()) {
      for (const auto& x : span.domain) {
        for (const auto& label : m.label_schema()) {
          const Intervention i{span.name, x};
          const auto truncated = interventional_distribution(m, i, label.name);
          const auto by_units = interventional_distribution_by_units(m, i, label.name);
          c.expect(truncated == by_units, "routes differ for do(" + span.name + " := " + x + ") on " + label.name +
                                              " at " + params_str(a, bp, bm));
          ++compared;
        }
      }
    }
  });
  c.expect(compared == 125 * 12, "compared " + std::to_string(compared) + " interventions");
}

// 6. Sampled corpus against exact values.
void sampling(Checker& c) {
  const auto m = paper(kHalf, kHalf, kHalf);
  std::stringstream ss;
  write_jsonl(m, generate_dataset(m, 100000, kShippedSeed), ss);
  const auto data = read_jsonl(ss);
  c.expect(data.records.size() == 100000, "corpus size");

  const auto x1 = empirical_audit(data, "x1", "y");
  const auto& t = x1.test;
  std::size_t pizza = 0, pizza_pos = 0;
  for (std::size_t r = 0; r < t.row_values.size(); ++r) {
    if (t.row_values[r] != "the pizza") continue;
    for (std::size_t k = 0; k < t.col_values.size(); ++k) {
      pizza += t.counts[r][k];
      if (t.col_values[k] == "Pos") pizza_pos += t.counts[r][k];
    }
  }
  const double p_pos = pizza ? static_cast<double>(pizza_pos) / pizza : 0;
  c.expect(std::abs(p_pos - 0.75) <= 0.01, "empirical P(Pos | pizza) = " + std::to_string(p_pos));
  c.expect(t.p_value < 1e-6, "(x1,y) not rejected, p = " + std::to_string(t.p_value));
  const auto x2 = empirical_audit(data, "x2", "y");
  c.expect(x2.test.p_value >= 1e-3, "(x2,y) rejected, p = " + std::to_string(x2.test.p_value));

  const double exact_mi = oracle::mutual_information_bits(oracle::paper_joint(kHalf, kHalf, kHalf), 0, 3);
  c.expect(std::abs(exact_mi - 0.18872) < 1e-5, "oracle MI " + std::to_string(exact_mi));
  c.expect(std::abs(t.mi_bits - exact_mi) <= 0.01, "empirical MI " + std::to_string(t.mi_bits));
}

// 7. Distribution algebra on the built-in model and on random grammars.
void algebra_on(Checker& c, const JointTable& j, const oracle::Joint& brute, const std::string& where) {
  const auto rows = rows_of(j);
  c.expect(rows == brute, "joint differs from brute force " + where);

  const auto& schema = j.schema();
  const std::size_t n = schema.size();
  auto sum_cells = [](const JointTable& t) {
    Rational s = 0;
    for (const auto& [cell, p] : t.cells()) s += p;
    return s;
  };
  c.expect(sum_cells(j) == 1, "joint does not sum to 1 " + where);

  auto names = [&](unsigned mask) {
    std::vector<std::string> out;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1u << v)) out.push_back(schema[v].name);
    }
    return out;
  };
  auto indices = [&](unsigned mask) {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1u << v)) out.push_back(v);
    }
    return out;
  };

  for (unsigned a = 1; a < (1u << n); ++a) {
    const auto ma = marginalize(j, names(a));
    c.expect(sum_cells(ma) == 1, "marginal does not sum to 1 " + where);
    c.expect(rows_of(ma) == oracle::marginal(brute, indices(a)), "marginal differs from oracle " + where);
    // Every subset of a: marginalizing in two steps equals one step.
    for (unsigned b = (a - 1) & a; b != 0; b = (b - 1) & a) {
      c.expect(marginalize(ma, names(b)) == marginalize(j, names(b)), "marginalization does not compose " + where);
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t g = 0; g < n; ++g) {
      if (t == g) continue;
      const auto& tn = schema[t].name;
      const auto& gn = schema[g].name;
      const auto cond = condition(j, {tn}, {gn});
      for (const auto& row : cond.rows) {
        Rational s = 0;
        for (const auto& p : row.dist.probs) s += p;
        c.expect(s == 1, "conditional row does not sum to 1 " + where);
      }
      const auto back = recombine(cond, marginalize(j, {gn}));
      // recombine orders its schema targets first.
      c.expect(sum_cells(back) == 1 && rows_of(back) == oracle::marginal(brute, {t, g}),
               "recombine differs from joint " + where);

      const double mi = mutual_information(j, tn, gn);
      const bool ind = is_independent(j, tn, gn).independent;
      c.expect(mi >= 0, "negative MI " + where);
      c.expect((mi == 0) == ind, "MI zero does not match independence " + where);
      c.expect(ind == oracle::independent(brute, t, g), "independence differs from oracle " + where);
      if (!ind) {
        c.expect(std::abs(mi - oracle::mutual_information_bits(brute, t, g)) < 1e-9, "MI differs from oracle " + where);
      }

      // TV between every pair of rows: symmetric, within [0, 1], zero iff equal.
      for (const auto& r1 : cond.rows) {
        for (const auto& r2 : cond.rows) {
          const auto d12 = total_variation(r1.dist, r2.dist);
          c.expect(d12 == total_variation(r2.dist, r1.dist), "TV not symmetric " + where);
          c.expect(d12 >= 0 && d12 <= 1, "TV out of bounds " + where);
          c.expect((d12 == 0) == (r1.dist == r2.dist), "TV zero does not match equality " + where);
          for (const auto& r3 : cond.rows) {
            c.expect(d12 <= total_variation(r1.dist, r3.dist) + total_variation(r3.dist, r2.dist),
                     "TV triangle inequality " + where);
          }
        }
      }
    }
  }
}

void algebra(Checker& c) {
  for_grid([&](const Rational& a, const Rational& bp, const Rational& bm) {
    const auto m = paper(a, bp, bm);
    c.expect(m.derivations().size() == 8, "built-in model does not have 8 derivations");
    algebra_on(c, model_joint(m), oracle::paper_joint(a, bp, bm), "at " + params_str(a, bp, bm));

    // Interventional distributions are distributions too.
    for (const auto& span : m.span_schema()) {
      for (const auto& x : span.domain) {
        for (const auto& label : m.label_schema()) {
          Rational s = 0;
          for (const auto& p : interventional_distribution(m, {span.name, x}, label.name).probs) s += p;
          c.expect(s == 1, "interventional distribution does not sum to 1");
        }
      }
    }
  });

  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rc = oracle::random_case(rng);
    c.expect(rc.brute.size() <= 100, "random grammar too large");
    const Model m(Pcfg("S", rc.spec.productions), rc.spec.scm);
    algebra_on(c, model_joint(m), oracle::brute_joint(rc), "on random model " + std::to_string(trial));
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Checker&)>>> criteria{
      {"confounding at alpha = 1/2 (not UIF, CI)", confounding},
      {"UIF without CI at alpha = 0", uif_without_ci},
      {"125-point sweep against closed form", sweep_grid},
      {"intervention soundness and do/condition gap", intervention_soundness},
      {"truncated factorization equals unit aggregation", two_routes},
      {"sampling consistency, n = 100000", sampling},
      {"distribution algebra properties", algebra},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.ok()) {
      std::printf("PASS %zu %s (%.2fs)\n", i + 1, criteria[i].first, secs);
    } else {
      ++failed;
      std::printf("FAIL %zu %s: %s\n", i + 1, criteria[i].first, c.summary().c_str());
    }
  }
  return failed == 0 ? 0 : 1;
}
