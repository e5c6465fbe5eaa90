#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcfgscm/noise.hpp"
#include "pcfgscm/rational.hpp"

namespace pcfgscm {

enum class SymbolKind { terminal, nonterminal };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::nonterminal;

  static Symbol terminal(std::string name) { return {std::move(name), SymbolKind::terminal}; }
  static Symbol nonterminal(std::string name) { return {std::move(name), SymbolKind::nonterminal}; }

  bool is_terminal() const { return kind == SymbolKind::terminal; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// A rule `lhs -> rhs` with an exact probability. Zero-probability rules are
/// kept: they stay structurally present (their yields remain producible span
/// values) but are never selected by the sampler.
struct Production {
  std::string lhs;
  std::vector<Symbol> rhs;
  Rational prob;

  friend bool operator==(const Production&, const Production&) = default;
};

/// Unvalidated grammar as read from text or assembled by hand. `lines`, when
/// non-empty, holds the 1-based source line of each production.
struct GrammarSource {
  std::string start;
  std::vector<Production> productions;
  std::vector<std::size_t> lines;
};

enum class GrammarErrorKind {
  syntax,
  invalid_production,
  symbol_clash,
  probability_sum,
  unknown_symbol,
  cycle,
};

const char* to_string(GrammarErrorKind kind);

class GrammarError : public std::runtime_error {
 public:
  GrammarError(GrammarErrorKind kind, std::string message, std::string symbol = {}, std::size_t line = 0,
               std::size_t column = 0);

  GrammarErrorKind kind() const { return kind_; }
  const std::string& symbol() const { return symbol_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  GrammarErrorKind kind_;
  std::string symbol_;
  std::size_t line_;
  std::size_t column_;
};

struct GrammarIssue {
  GrammarErrorKind kind;
  std::string symbol;
  std::string message;
  std::size_t line = 0;
};

struct NonterminalDiagnostics {
  std::string name;
  std::size_t production_count = 0;
  Rational probability_sum;
  bool reachable = false;
  bool on_cycle = false;
};

struct ValidationReport {
  std::string start;
  std::vector<NonterminalDiagnostics> nonterminals;  // order of first appearance
  std::vector<GrammarIssue> errors;                  // ordered by kind, then appearance
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  std::string to_text() const;
};

ValidationReport validate(const GrammarSource& source);

/// Validated, immutable PCFG: per-nonterminal probabilities sum to exactly 1,
/// every reachable nonterminal is defined, and the nonterminal graph is
/// acyclic. Declaration order of productions is semantic: it fixes the
/// inverse-CDF mapping from noise values to rules.
class Pcfg {
 public:
  /// Throws GrammarError describing the first validation error.
  explicit Pcfg(GrammarSource source);
  Pcfg(std::string start, std::vector<Production> productions);

  const std::string& start() const { return start_; }
  std::span<const Production> productions() const { return productions_; }
  const Production& production(std::size_t index) const { return productions_.at(index); }

  /// Indices into productions() for `nonterminal`, in declaration order.
  std::span<const std::size_t> alternatives(std::string_view nonterminal) const;

  bool is_nonterminal(std::string_view name) const;

  /// Nonterminals in order of first appearance.
  const std::vector<std::string>& nonterminals() const { return nonterminals_; }

 private:
  std::string start_;
  std::vector<Production> productions_;
  std::vector<std::string> nonterminals_;
  std::unordered_map<std::string, std::vector<std::size_t>> alternatives_;
};

ValidationReport validate(const Pcfg& g);

/// One leftmost derivation: `steps[k]` is the production chosen at the k-th
/// expansion site in leftmost order.
struct Derivation {
  std::vector<std::size_t> steps;
  std::vector<std::string> yield;

  friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct WeightedDerivation {
  Derivation derivation;
  Rational probability;
};

/// Yield range [begin, end) covered by the subtree rooted at an expansion site.
struct SiteSpan {
  std::size_t step = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// All derivations of the start symbol, including those containing
/// zero-probability rules, ordered lexicographically by the site-wise rule
/// indices. Probabilities sum to exactly 1.
std::vector<WeightedDerivation> enumerate_derivations(const Pcfg& g);

/// Draws one noise value per expansion site in leftmost order and picks the
/// first alternative whose cumulative probability strictly exceeds it.
Derivation sample_derivation(const Pcfg& g, NoiseStream& noise);

Rational derivation_probability(const Pcfg& g, const Derivation& d);

/// Yield ranges of every expansion site; `result[k]` belongs to `d.steps[k]`.
/// Throws std::invalid_argument if `d` is not a well-formed derivation of g.
std::vector<SiteSpan> site_spans(const Pcfg& g, const Derivation& d);

}  // namespace pcfgscm
