#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcfgscm/exact_dist.hpp"
#include "pcfgscm/noise.hpp"
#include "pcfgscm/pcfg.hpp"

namespace pcfgscm {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a span nonterminal is missing from, or repeated in, a derivation.
class SpanError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Raised when a mechanism has no row for a parent assignment, which is how an
/// out-of-domain intervention value surfaces.
class MissingRowError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// A text span variable. Its value is the space-joined yield of whichever of
/// `nonterminals` occurs in the derivation; exactly one occurrence is required.
struct SpanVar {
  std::string name;
  std::vector<std::string> nonterminals;
};

/// Conditional probability table with inverse-CDF noise semantics: given the
/// parent values, the output is the first one whose cumulative row
/// probability strictly exceeds the noise value.
struct Mechanism {
  std::string name;
  std::vector<std::string> parents;
  std::vector<std::string> outputs;
  std::map<std::vector<std::string>, std::vector<Rational>> rows;

  /// Throws MissingRowError.
  const std::vector<Rational>& row(const std::vector<std::string>& parent_values) const;
  bool reads(std::string_view span) const;
};

struct LabelVar {
  std::string name;
  Mechanism mechanism;
};

struct ScmSpec {
  std::vector<SpanVar> spans;
  std::vector<LabelVar> labels;
};

/// A realized assignment: span values and label values in ScmSpec order.
struct Assignment {
  std::vector<std::string> spans;
  std::vector<std::string> labels;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// One exogenous-noise realization. `noise` holds one value per label
/// mechanism; `realized` is recomputable from the derivation and the noise.
struct Unit {
  Derivation derivation;
  std::vector<Rational> noise;
  Assignment realized;
};

struct Intervention {
  std::string target;
  std::string value;
};

/// A grammar coupled to a structural causal model. Construction validates the
/// pairing and enumerates derivations once; the object is immutable after.
class Model {
 public:
  Model(Pcfg grammar, ScmSpec scm);

  const Pcfg& grammar() const { return grammar_; }
  const ScmSpec& scm() const { return scm_; }

  const std::vector<WeightedDerivation>& derivations() const { return derivations_; }
  /// Span values of derivations()[k].
  const std::vector<std::vector<std::string>>& derivation_spans() const { return derivation_spans_; }

  /// Span variables with their grammar-producible values, in order of first
  /// appearance across the enumeration.
  const std::vector<VarSchema>& span_schema() const { return span_schema_; }
  std::vector<VarSchema> label_schema() const;

  std::size_t span_index(std::string_view name) const;
  std::size_t label_index(std::string_view name) const;
  bool has_span(std::string_view name) const;

 private:
  Pcfg grammar_;
  ScmSpec scm_;
  std::vector<WeightedDerivation> derivations_;
  std::vector<std::vector<std::string>> derivation_spans_;
  std::vector<VarSchema> span_schema_;
};

/// Span values of `d` in `scm.spans` order. Throws SpanError.
std::vector<std::string> extract_spans(const Pcfg& g, const Derivation& d, const ScmSpec& scm);

/// Throws MissingRowError when `parent_values` has no row.
std::string apply_mechanism(const Mechanism& m, const std::vector<std::string>& parent_values, const Rational& noise);

/// Parent values of `m` drawn from a span assignment.
std::vector<std::string> parent_values(const Model& model, const Mechanism& m, const std::vector<std::string>& spans);

/// Exact joint over span variables then label variables.
JointTable model_joint(const Model& model);

/// Builds a unit from a derivation and one noise value per label mechanism.
Unit make_unit(const Model& model, Derivation derivation, std::vector<Rational> noise);

/// Samples the derivation (one value per expansion site), then draws one value
/// per label mechanism in declaration order.
Unit generate_unit(const Model& model, NoiseStream& noise);

/// Abduction-action-prediction with the unit's own noise: replace the target
/// span, recompute every label.
Assignment counterfactual(const Model& model, const Unit& unit, const Intervention& intervention);

using SpanCondition = std::vector<std::pair<std::string, std::string>>;

/// P(label | do(target := value), condition_on) by truncated factorization:
/// P(spans) with the target clamped, then the label's mechanism row. The
/// conditioning set is applied after the intervention. Throws ModelError when
/// that set has zero post-intervention mass.
Distribution interventional_distribution(const Model& model, const Intervention& intervention,
                                         std::string_view label, const SpanCondition& condition_on = {});

/// One cell of the exact unit space: a positive-probability derivation and a
/// noise box on which every factual and counterfactual output is constant.
struct CounterfactualRow {
  std::size_t derivation_index = 0;
  Rational weight;  // P(derivation) * volume of the noise box
  Unit unit;        // noise at the lower corner of the box
  Assignment counterfactual;
};

/// Partitions the unit space into boxes with constant counterfactual outcome
/// and evaluates counterfactual() once per box.
std::vector<CounterfactualRow> counterfactual_table(const Model& model, const Intervention& intervention);

/// Same quantity as interventional_distribution, aggregated from unit-level
/// counterfactuals over counterfactual_table().
Distribution interventional_distribution_by_units(const Model& model, const Intervention& intervention,
                                                  std::string_view label, const SpanCondition& condition_on = {});

struct CiWitness {
  Unit unit;
  Intervention intervention;
  std::string factual_label;
  std::string counterfactual_label;
};

struct CiResult {
  bool invariant = true;
  std::optional<CiWitness> witness;  // present iff !invariant
};

/// Invariant iff, for every positive-probability derivation and every
/// intervention value, the label's row at the intervened parents equals the
/// row at the factual parents. Under the shared inverse-CDF coupling this is
/// the same as the output agreeing for every noise value. The intervention
/// domain is the producible values of `feature` plus `extra_values`.
CiResult is_counterfactually_invariant(const Model& model, std::string_view feature, std::string_view label,
                                       const std::vector<std::string>& extra_values = {});

}  // namespace pcfgscm
