#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pcfgscm/causal.hpp"
#include "pcfgscm/exact_dist.hpp"
#include "pcfgscm/paper_model.hpp"

namespace pcfgscm {

enum class UifDefinition { independence, uniformity };

std::string_view to_string(UifDefinition d);

/// Two feature values whose conditional label distributions differ.
struct WitnessPair {
  std::string x;
  std::string x_prime;
  Rational tv;
};

struct UifVerdict {
  std::string feature;
  std::string label;
  UifDefinition definition = UifDefinition::independence;
  bool satisfied = false;
  double mi_bits = 0;
  Rational max_tv;                              // largest pairwise TV between P(label | feature = x) rows
  std::optional<WitnessPair> witness_pair;      // present iff !satisfied and some pair differs
  std::optional<ConditionalRow> nonuniform_row;  // uniformity definition only
};

/// One verdict per (span, label) pair, labels outer, spans inner.
std::vector<UifVerdict> uif_report(const Model& model, UifDefinition definition);

/// All unordered pairs of positive-probability feature values with nonzero TV
/// between their conditional label distributions, TV descending (ties keep
/// domain order). Throws DistributionError when fewer than two values have
/// positive probability.
std::vector<WitnessPair> uif_witness_pairs(const Model& model, std::string_view feature, std::string_view label);

struct CiVerdict {
  std::string feature;
  std::string label;
  bool invariant = true;
  std::optional<CiWitness> witness;
};

/// Same pair order as uif_report.
std::vector<CiVerdict> ci_report(const Model& model);

enum class Quadrant { causal_informative, spurious_in_causal_sense, hidden_causal, fully_clean };

std::string_view to_string(Quadrant q);
Quadrant classify(bool uif, bool ci);

struct QuadrantEntry {
  std::string feature;
  std::string label;
  bool uif = false;
  bool ci = false;
  Quadrant quadrant = Quadrant::fully_clean;
};

struct QuadrantReport {
  std::vector<QuadrantEntry> entries;

  const QuadrantEntry* find(std::string_view feature, std::string_view label) const;
};

/// Joins the independence-definition UIF report with the CI report.
QuadrantReport quadrant_report(const Model& model);

// Parameter sweep over the built-in model.

struct SweepPair {
  std::string feature;
  std::string label;
  bool uif = false;
  bool uif_predicted = false;
  bool ci = false;
  bool ci_predicted = false;
  Rational max_tv;
  double mi_bits = 0;
};

struct SweepRow {
  PaperParams params;
  std::vector<SweepPair> pairs;  // (X1,Y), (X2,Y), (X3,Y), (X1,Z)
  /// With a disjoint lexicon computed booleans must equal the predictions;
  /// otherwise a predicted independence only has to hold (if, not iff).
  bool nondegenerate = true;
  bool match = true;
};

/// Closed-form predictions: (X1,Y) independent iff alpha = 0, (X2,Y) iff
/// beta+ = beta-, (X3,Y) iff beta+ = 1 - beta-, (X1,Z) never. CI: only
/// (X1,Y) is invariant. Rows in grid order, alpha outermost.
std::vector<SweepRow> sweep(const std::vector<Rational>& alphas, const std::vector<Rational>& beta_plus,
                            const std::vector<Rational>& beta_minus, const PaperLexicon& lexicon = {});

/// Rational grid `lo..hi/step`, or a single value. Endpoints and step may be
/// written as integers, `p/q` or terminating decimals (converted exactly).
/// Throws std::invalid_argument.
std::vector<Rational> parse_grid(std::string_view text);

// Datasets.

/// Seed used for the reference corpus and the sampling checks.
inline constexpr std::uint64_t kShippedSeed = 7;

/// n records sampled from the model with NoiseStream::seeded(seed).
std::vector<Assignment> generate_dataset(const Model& model, std::size_t n, std::uint64_t seed);

/// Field name used for a variable in JSON Lines output: the lowercased name.
std::string field_name(std::string_view variable);

/// One JSON object per line, keys in span-then-label order.
void write_jsonl(const Model& model, const std::vector<Assignment>& records, std::ostream& os);

}  // namespace pcfgscm
