#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcfgscm/rational.hpp"

namespace pcfgscm {

class DistributionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A named discrete variable with an ordered domain. Domain order drives row
/// order in tables and tie-breaking in witnesses.
struct VarSchema {
  std::string name;
  std::vector<std::string> domain;

  /// Throws DistributionError if `value` is not in the domain.
  std::size_t index_of(std::string_view value) const;

  friend bool operator==(const VarSchema&, const VarSchema&) = default;
};

/// Domain indices of a full assignment, in schema order.
using Cell = std::vector<std::size_t>;

/// A finite distribution over an ordered list of outcomes.
struct Distribution {
  std::vector<std::string> outcomes;
  std::vector<Rational> probs;

  Rational prob(std::string_view outcome) const;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

/// Exact joint distribution. Only positive-probability cells are stored;
/// every other assignment has probability 0. Cells always sum to exactly 1.
class JointTable {
 public:
  JointTable(std::vector<VarSchema> schema, std::map<Cell, Rational> cells);

  const std::vector<VarSchema>& schema() const { return schema_; }
  const std::map<Cell, Rational>& cells() const { return cells_; }

  std::size_t var_index(std::string_view name) const;
  const VarSchema& var(std::string_view name) const { return schema_[var_index(name)]; }

  /// Probability of a full assignment given as values in schema order.
  Rational prob(const std::vector<std::string>& values) const;

  friend bool operator==(const JointTable&, const JointTable&) = default;

 private:
  std::vector<VarSchema> schema_;
  std::map<Cell, Rational> cells_;
};

struct ConditionalRow {
  std::vector<std::string> given;  // values of the given variables
  Rational given_prob;             // marginal probability of `given`
  Distribution dist;               // over target assignments
};

/// P(targets | given). Rows exist only for given-assignments of positive
/// probability, ordered lexicographically by domain index. Multi-variable
/// target outcomes are labelled by their values joined with ",".
struct ConditionalTable {
  std::vector<VarSchema> targets;
  std::vector<VarSchema> given;
  std::vector<ConditionalRow> rows;

  /// Row for the given values, or nullptr when that assignment has zero mass.
  const ConditionalRow* find(const std::vector<std::string>& given_values) const;
};

/// Keeps `keep` (in the table's schema order) and sums out everything else.
JointTable marginalize(const JointTable& j, const std::vector<std::string>& keep);

/// Marginal of one variable as a distribution over its full domain.
Distribution marginal_distribution(const JointTable& j, std::string_view name);

ConditionalTable condition(const JointTable& j, const std::vector<std::string>& targets,
                           const std::vector<std::string>& given);

/// Rebuilds P(targets, given) from P(targets | given) and P(given).
JointTable recombine(const ConditionalTable& c, const JointTable& given_marginal);

struct CellDeviation {
  std::string a_value;
  std::string b_value;
  Rational joint;
  Rational product;
  Rational deviation;  // |joint - product|
};

struct IndependenceResult {
  bool independent = false;
  std::optional<CellDeviation> witness;  // present iff !independent
};

/// Exact test of P(a,b) == P(a)P(b) on every cell. The witness is the cell of
/// largest deviation, ties going to the earliest cell in domain order.
IndependenceResult is_independent(const JointTable& j, std::string_view a, std::string_view b);

struct UniformityResult {
  bool uniform = false;
  std::optional<ConditionalRow> witness;  // first non-uniform row
};

UniformityResult is_uniform_conditional(const ConditionalTable& c);

/// Plug-in mutual information in bits. Returns exactly 0.0 when the exact
/// independence check passes, and a strictly positive value otherwise.
double mutual_information(const JointTable& j, std::string_view a, std::string_view b);

/// Half the L1 distance. Throws DistributionError if the outcome lists differ.
Rational total_variation(const Distribution& p, const Distribution& q);

/// CSV with one column per variable and a trailing `prob` column of `p/q`
/// strings. Rows are the positive cells in lexicographic domain-index order.
void write_csv(const JointTable& j, std::ostream& os);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

}  // namespace pcfgscm
