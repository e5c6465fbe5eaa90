#include "pcfgscm/audit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pcfgscm/grammar_dsl.hpp"

namespace pcfgscm {
namespace {

const Rational kHalf(1, 2);
const Rational kQuarter(1, 4);
const std::vector<Rational> kAlphas{-1, Rational(-1, 2), 0, kHalf, 1};
const std::vector<Rational> kBetas{0, kQuarter, kHalf, Rational(3, 4), 1};

Model paper(Rational a, Rational bp = kHalf, Rational bm = kHalf) { return make_paper_model({a, bp, bm}).model; }

const UifVerdict& find(const std::vector<UifVerdict>& vs, const std::string& f, const std::string& l) {
  for (const auto& v : vs) {
    if (v.feature == f && v.label == l) return v;
  }
  throw std::out_of_range(f + l);
}

// Binary entropy, used for the closed-form MI of (X1, Y).
double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

TEST(UifReport, PairOrderIsLabelsOuterSpansInner) {
  const auto r = uif_report(paper(0), UifDefinition::independence);
  ASSERT_EQ(r.size(), 6u);
  const std::vector<std::pair<std::string, std::string>> expected{{"X1", "Y"}, {"X2", "Y"}, {"X3", "Y"},
                                                                  {"X1", "Z"}, {"X2", "Z"}, {"X3", "Z"}};
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].feature, expected[i].first);
    EXPECT_EQ(r[i].label, expected[i].second);
  }
}

TEST(UifReport, ConfoundedTargetAtHalfAlpha) {
  const auto r = uif_report(paper(kHalf), UifDefinition::independence);
  const auto& v = find(r, "X1", "Y");
  EXPECT_FALSE(v.satisfied);
  EXPECT_EQ(v.max_tv, kHalf);
  ASSERT_TRUE(v.witness_pair);
  EXPECT_EQ(v.witness_pair->x, "the pizza");
  EXPECT_EQ(v.witness_pair->x_prime, "the sushi");
  EXPECT_NEAR(v.mi_bits, 1 - h2(0.75), 1e-12);
  EXPECT_NEAR(v.mi_bits, oracle::mutual_information_bits(oracle::paper_joint(kHalf, kHalf, kHalf), 0, 3), 1e-12);
}

TEST(UifReport, MiMatchesOracleAcrossGrid) {
  for (const auto& a : kAlphas) {
    for (const auto& bp : kBetas) {
      const auto r = uif_report(paper(a, bp, kQuarter), UifDefinition::independence);
      const auto joint = oracle::paper_joint(a, bp, kQuarter);
      for (std::size_t f = 0; f < 3; ++f) {
        const auto& v = find(r, "X" + std::to_string(f + 1), "Y");
        EXPECT_NEAR(v.mi_bits, oracle::mutual_information_bits(joint, f, 3), 1e-12);
        EXPECT_EQ(v.satisfied, v.mi_bits < 1e-12);
        EXPECT_EQ(v.satisfied, !v.witness_pair.has_value());
      }
    }
  }
}

TEST(UifReport, DefinitionsDisagreeOnSkewedLabel) {
  // L ignores A entirely but is not uniform: independent, yet not uniform.
  const auto g = parse_grammar("S -> A : 1\nA -> 'a' : 1/2\nA -> 'b' : 1/2");
  const ScmSpec scm{{{"X1", {"A"}}}, {{"L", {"f_L", {}, {"u", "v"}, {{{}, {Rational(3, 4), kQuarter}}}}}}};
  const Model m(g, scm);
  const auto ind = uif_report(m, UifDefinition::independence);
  const auto uni = uif_report(m, UifDefinition::uniformity);
  EXPECT_TRUE(ind[0].satisfied);
  EXPECT_FALSE(ind[0].nonuniform_row);
  EXPECT_FALSE(uni[0].satisfied);
  ASSERT_TRUE(uni[0].nonuniform_row);
  EXPECT_EQ(uni[0].nonuniform_row->dist.probs, (std::vector<Rational>{Rational(3, 4), kQuarter}));
  // No pair of rows differs, so there is no pair witness either way.
  EXPECT_FALSE(uni[0].witness_pair);
  EXPECT_EQ(uni[0].max_tv, 0);
}

TEST(UifReport, DefinitionsAgreeOnBuiltInModelLabels) {
  // P(Y) and P(Z) are both uniform here, so the two notions coincide.
  for (const auto& a : kAlphas) {
    for (const auto& bp : kBetas) {
      const auto m = paper(a, bp, Rational(3, 4));
      const auto ind = uif_report(m, UifDefinition::independence);
      const auto uni = uif_report(m, UifDefinition::uniformity);
      for (std::size_t i = 0; i < ind.size(); ++i) EXPECT_EQ(ind[i].satisfied, uni[i].satisfied);
    }
  }
}

TEST(WitnessPairs, Examples) {
  const auto x1 = uif_witness_pairs(paper(kHalf), "X1", "Y");
  ASSERT_EQ(x1.size(), 1u);
  EXPECT_EQ(x1[0].tv, kHalf);

  EXPECT_TRUE(uif_witness_pairs(paper(0, Rational(3, 4), Rational(3, 4)), "X2", "Y").empty());

  const auto x3 = uif_witness_pairs(paper(0, Rational(3, 4), Rational(3, 4)), "X3", "Y");
  ASSERT_EQ(x3.size(), 1u);
  EXPECT_EQ(x3[0].x, "delicious");
  EXPECT_EQ(x3[0].x_prime, "greasy");
  EXPECT_EQ(x3[0].tv, kHalf);
}

TEST(WitnessPairs, SortedByTvAcrossThreeValues) {
  const auto g = parse_grammar("S -> A : 1\nA -> 'a' : 1/3\nA -> 'b' : 1/3\nA -> 'c' : 1/3");
  Mechanism f{"f_L", {"X1"}, {"u", "v"}, {}};
  f.rows[{"a"}] = {1, 0};
  f.rows[{"b"}] = {kHalf, kHalf};
  f.rows[{"c"}] = {kQuarter, Rational(3, 4)};
  const Model m(g, {{{"X1", {"A"}}}, {{"L", f}}});
  const auto pairs = uif_witness_pairs(m, "X1", "L");
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].x + pairs[0].x_prime, "ac");
  EXPECT_EQ(pairs[0].tv, Rational(3, 4));
  EXPECT_EQ(pairs[1].x + pairs[1].x_prime, "ab");
  EXPECT_EQ(pairs[1].tv, kHalf);
  EXPECT_EQ(pairs[2].x + pairs[2].x_prime, "bc");
  EXPECT_EQ(pairs[2].tv, kQuarter);
}

TEST(WitnessPairs, SingleValuedFeatureThrows) {
  const auto g = parse_grammar("S -> A : 1\nA -> 'a' : 1\nA -> 'b' : 0");
  const Model m(g, {{{"X1", {"A"}}}, {{"L", {"f_L", {}, {"u", "v"}, {{{}, {kHalf, kHalf}}}}}}});
  EXPECT_THROW(uif_witness_pairs(m, "X1", "L"), DistributionError);
}

TEST(CiReport, BuiltInTable) {
  for (const auto& a : kAlphas) {
    const auto r = ci_report(paper(a, kQuarter, Rational(3, 4)));
    ASSERT_EQ(r.size(), 6u);
    // Y reads X2 and X3; Z reads X1.
    const std::vector<bool> expected{true, false, false, false, true, true};
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_EQ(r[i].invariant, expected[i]) << r[i].feature << r[i].label;
      EXPECT_EQ(r[i].invariant, !r[i].witness.has_value());
    }
  }
}

TEST(Quadrants, Classify) {
  EXPECT_EQ(classify(false, false), Quadrant::causal_informative);
  EXPECT_EQ(classify(false, true), Quadrant::spurious_in_causal_sense);
  EXPECT_EQ(classify(true, false), Quadrant::hidden_causal);
  EXPECT_EQ(classify(true, true), Quadrant::fully_clean);
  EXPECT_EQ(to_string(Quadrant::spurious_in_causal_sense), "spurious-in-causal-sense");
}

TEST(Quadrants, BuiltInExamples) {
  EXPECT_EQ(quadrant_report(paper(kHalf)).find("X1", "Y")->quadrant, Quadrant::spurious_in_causal_sense);

  const auto neutral = quadrant_report(paper(0));
  EXPECT_EQ(neutral.find("X1", "Y")->quadrant, Quadrant::fully_clean);
  EXPECT_EQ(neutral.find("X2", "Y")->quadrant, Quadrant::hidden_causal);
  EXPECT_EQ(neutral.find("X3", "Y")->quadrant, Quadrant::hidden_causal);
  EXPECT_EQ(neutral.find("X1", "Z")->quadrant, Quadrant::causal_informative);

  const auto skew = quadrant_report(paper(0, Rational(3, 4), kQuarter));
  EXPECT_EQ(skew.find("X2", "Y")->quadrant, Quadrant::causal_informative);
  EXPECT_EQ(skew.find("X3", "Y")->quadrant, Quadrant::hidden_causal);
  EXPECT_EQ(skew.find("X9", "Y"), nullptr);
}

TEST(Sweep, FullGridMatchesPredictions) {
  const auto rows = sweep(kAlphas, kBetas, kBetas);
  ASSERT_EQ(rows.size(), 125u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.nondegenerate);
    EXPECT_TRUE(r.match);
    ASSERT_EQ(r.pairs.size(), 4u);
    for (const auto& p : r.pairs) {
      EXPECT_EQ(p.uif, p.uif_predicted) << p.feature << p.label;
      EXPECT_EQ(p.ci, p.ci_predicted);
    }
    EXPECT_TRUE(r.pairs[0].ci);
    EXPECT_FALSE(r.pairs[1].ci);
    EXPECT_FALSE(r.pairs[2].ci);
    EXPECT_FALSE(r.pairs[3].ci);
    EXPECT_EQ(r.pairs[0].max_tv, abs(r.params.alpha));
  }
  // Grid order: alpha outermost.
  EXPECT_EQ(rows.front().params.alpha, -1);
  EXPECT_EQ(rows[1].params.beta_minus, kQuarter);
  EXPECT_EQ(rows.back().params.alpha, 1);
}

TEST(Sweep, IndependenceCountsFromClosedForm) {
  // Independent cells per pair over 5x5x5: X1Y 25, X2Y 25, X3Y 25, X1Z 0.
  const auto rows = sweep(kAlphas, kBetas, kBetas);
  std::vector<int> counts(4, 0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < 4; ++k) counts[k] += r.pairs[k].uif;
  }
  EXPECT_EQ(counts, (std::vector<int>{25, 25, 25, 0}));
}

TEST(Sweep, OverlappingLexiconUsesImplication) {
  const auto rows = sweep(kAlphas, kBetas, kBetas, PaperLexicon::rich());
  for (const auto& r : rows) {
    EXPECT_EQ(r.nondegenerate, PaperLexicon::rich().disjoint());
    EXPECT_TRUE(r.match);
  }
}

TEST(ParseGrid, Forms) {
  EXPECT_EQ(parse_grid("1/2"), (std::vector<Rational>{kHalf}));
  EXPECT_EQ(parse_grid("0..1/0.25"), kBetas);
  EXPECT_EQ(parse_grid("-1..1/0.5"), kAlphas);
  // Only the middle slash leaves two valid numbers.
  EXPECT_EQ(parse_grid("0..3/4/1/4"), (std::vector<Rational>{0, kQuarter, kHalf, Rational(3, 4)}));
  EXPECT_EQ(parse_grid("0.1..0.3/0.1"), (std::vector<Rational>{Rational(1, 10), Rational(1, 5), Rational(3, 10)}));
  EXPECT_EQ(parse_grid("0..1/0.3").back(), Rational(9, 10));
  EXPECT_EQ(parse_grid("-.5"), (std::vector<Rational>{Rational(-1, 2)}));
}

TEST(ParseGrid, Errors) {
  EXPECT_THROW(parse_grid("-1..1/1/2"), std::invalid_argument);  // 1 / (1/2) or (1/1) / 2
  EXPECT_THROW(parse_grid("0..1/1/4"), std::invalid_argument);
  EXPECT_THROW(parse_grid("0..1"), std::invalid_argument);
  EXPECT_THROW(parse_grid("0..1/0"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1..0/0.5"), std::invalid_argument);
  EXPECT_THROW(parse_grid("x"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1."), std::invalid_argument);
  EXPECT_THROW(parse_grid("1e-3"), std::invalid_argument);
  try {
    parse_grid("-1..1/1/2");
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("ambiguous"), std::string::npos);
  }
}

TEST(GenerateDataset, WellFormedRecords) {
  const auto m = paper(kHalf);
  const auto records = generate_dataset(m, 8, 7);
  ASSERT_EQ(records.size(), 8u);
  for (const auto& r : records) {
    ASSERT_EQ(r.spans.size(), 3u);
    ASSERT_EQ(r.labels.size(), 2u);
    // Y follows f_Y exactly; Z follows the target.
    const bool pos = (r.spans[1] == "was") == (r.spans[2] == "delicious");
    EXPECT_EQ(r.labels[0], pos ? "Pos" : "Neg");
    EXPECT_EQ(r.labels[1], r.spans[0] == "the pizza" ? "Pizza" : "Sushi");
  }
}

TEST(GenerateDataset, DeterministicGrammarHasTwoRecords) {
  const auto records = generate_dataset(paper(1, 1, 1), 200, 3);
  std::set<std::vector<std::string>> distinct;
  for (const auto& r : records) {
    auto row = r.spans;
    row.insert(row.end(), r.labels.begin(), r.labels.end());
    distinct.insert(row);
  }
  EXPECT_EQ(distinct, (std::set<std::vector<std::string>>{{"the pizza", "was", "delicious", "Pos", "Pizza"},
                                                          {"the sushi", "was", "greasy", "Neg", "Sushi"}}));
}

TEST(GenerateDataset, SeedDeterminesOutput) {
  const auto m = paper(kHalf, kQuarter, Rational(3, 4));
  EXPECT_EQ(generate_dataset(m, 500, 11), generate_dataset(m, 500, 11));
  EXPECT_NE(generate_dataset(m, 500, 11), generate_dataset(m, 500, 12));
  // A prefix of a longer run is the shorter run.
  const auto longer = generate_dataset(m, 600, 11);
  EXPECT_EQ(std::vector<Assignment>(longer.begin(), longer.begin() + 500), generate_dataset(m, 500, 11));
  EXPECT_THROW(generate_dataset(m, 0, 11), std::invalid_argument);
}

TEST(WriteJsonl, FieldNamesAndOrder) {
  const auto m = paper(1, 1, 1);
  std::ostringstream os;
  write_jsonl(m, {{{"the pizza", "was", "delicious"}, {"Pos", "Pizza"}}}, os);
  EXPECT_EQ(os.str(), "{\"x1\":\"the pizza\",\"x2\":\"was\",\"x3\":\"delicious\",\"y\":\"Pos\",\"z\":\"Pizza\"}\n");
  EXPECT_EQ(field_name("X_Aa"), "x_aa");
}

TEST(WriteJsonl, CollidingNamesRejected) {
  const auto g = parse_grammar("S -> A B : 1\nA -> 'a' : 1\nB -> 'b' : 1");
  const Model m(g, {{{"X1", {"A"}}, {"x1", {"B"}}}, {}});
  std::ostringstream os;
  EXPECT_THROW(write_jsonl(m, {}, os), ModelError);
}

}  // namespace
}  // namespace pcfgscm
