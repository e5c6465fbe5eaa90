#include "pcfgscm/pcfg.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace pcfgscm {

const char* to_string(GrammarErrorKind kind) {
  switch (kind) {
    case GrammarErrorKind::syntax: return "syntax";
    case GrammarErrorKind::invalid_production: return "invalid-production";
    case GrammarErrorKind::symbol_clash: return "symbol-clash";
    case GrammarErrorKind::probability_sum: return "probability-sum";
    case GrammarErrorKind::unknown_symbol: return "unknown-symbol";
    case GrammarErrorKind::cycle: return "cycle";
  }
  return "unknown";
}

namespace {

std::string format_error(GrammarErrorKind kind, const std::string& message, std::size_t line, std::size_t column) {
  std::ostringstream os;
  if (line > 0) {
    os << "line " << line;
    if (column > 0) os << ", column " << column;
    os << ": ";
  }
  os << to_string(kind) << " error: " << message;
  return os.str();
}

}  // namespace

GrammarError::GrammarError(GrammarErrorKind kind, std::string message, std::string symbol, std::size_t line,
                           std::size_t column)
    : std::runtime_error(format_error(kind, message, line, column)),
      kind_(kind),
      symbol_(std::move(symbol)),
      line_(line),
      column_(column) {}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "start: " << start << "\n";
  std::size_t width = 11;
  for (const auto& nt : nonterminals) width = std::max(width, nt.name.size());
  os << "nonterminal" << std::string(width - 11 + 2, ' ') << "rules  sum      reachable  cyclic\n";
  for (const auto& nt : nonterminals) {
    std::string sum = to_short_string(nt.probability_sum);
    os << nt.name << std::string(width - nt.name.size() + 2, ' ');
    std::string rules = std::to_string(nt.production_count);
    os << rules << std::string(7 - std::min<std::size_t>(rules.size(), 6), ' ');
    os << sum << std::string(9 - std::min<std::size_t>(sum.size(), 8), ' ');
    os << (nt.reachable ? "yes" : "no ") << "        " << (nt.on_cycle ? "yes" : "no") << "\n";
  }
  for (const auto& e : errors) {
    os << "error: " << (e.line > 0 ? "line " + std::to_string(e.line) + ": " : "") << to_string(e.kind) << ": "
       << e.message << "\n";
  }
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  os << "verdict: " << (ok() ? "ok" : "fail") << "\n";
  return os.str();
}

ValidationReport validate(const GrammarSource& source) {
  ValidationReport report;
  report.start = source.start;
  const auto& prods = source.productions;
  auto line_of = [&](std::size_t i) -> std::size_t { return i < source.lines.size() ? source.lines[i] : 0; };

  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> index;
  auto note = [&](const std::string& name) {
    if (name.empty() || index.count(name)) return;
    index.emplace(name, order.size());
    order.push_back(name);
  };
  note(source.start);
  for (const auto& p : prods) {
    note(p.lhs);
    for (const auto& s : p.rhs) {
      if (!s.is_terminal()) note(s.name);
    }
  }

  std::vector<GrammarIssue> issues;
  std::set<std::string> terminals;
  std::unordered_map<std::string, std::vector<std::size_t>> alts;
  std::unordered_map<std::string, Rational> sums;
  std::unordered_map<std::string, std::size_t> first_line;

  if (source.start.empty()) {
    issues.push_back({GrammarErrorKind::invalid_production, "", "no start symbol (empty grammar)", 0});
  }
  for (std::size_t i = 0; i < prods.size(); ++i) {
    const auto& p = prods[i];
    if (p.lhs.empty()) {
      issues.push_back({GrammarErrorKind::invalid_production, "", "production with empty left-hand side", line_of(i)});
      continue;
    }
    if (p.rhs.empty()) {
      issues.push_back({GrammarErrorKind::invalid_production, p.lhs, "empty right-hand side for " + p.lhs, line_of(i)});
    }
    for (const auto& s : p.rhs) {
      if (s.name.empty()) {
        issues.push_back({GrammarErrorKind::invalid_production, p.lhs, "empty symbol name in rule for " + p.lhs,
                          line_of(i)});
      }
      if (s.is_terminal()) terminals.insert(s.name);
    }
    if (p.prob < 0 || p.prob > 1) {
      issues.push_back({GrammarErrorKind::invalid_production, p.lhs,
                        "probability " + to_short_string(p.prob) + " outside [0,1] for " + p.lhs, line_of(i)});
    }
    alts[p.lhs].push_back(i);
    sums[p.lhs] += p.prob;
    first_line.emplace(p.lhs, line_of(i));
  }
  for (const auto& name : order) {
    if (terminals.count(name)) {
      issues.push_back({GrammarErrorKind::symbol_clash, name,
                        "'" + name + "' is used both as a terminal and as a nonterminal", first_line[name]});
    }
  }
  for (const auto& name : order) {
    auto it = sums.find(name);
    if (it != sums.end() && it->second != 1) {
      issues.push_back({GrammarErrorKind::probability_sum, name,
                        "probabilities for " + name + " sum to " + to_short_string(it->second) + ", expected 1",
                        first_line[name]});
    }
  }

  // Reachability from start.
  std::unordered_set<std::string> reachable;
  std::vector<std::string> frontier;
  if (!source.start.empty()) {
    reachable.insert(source.start);
    frontier.push_back(source.start);
  }
  while (!frontier.empty()) {
    const auto nt = frontier.back();
    frontier.pop_back();
    auto it = alts.find(nt);
    if (it == alts.end()) continue;
    for (auto pi : it->second) {
      for (const auto& s : prods[pi].rhs) {
        if (!s.is_terminal() && reachable.insert(s.name).second) frontier.push_back(s.name);
      }
    }
  }
  for (const auto& name : order) {
    if (alts.count(name)) continue;
    if (reachable.count(name)) {
      issues.push_back({GrammarErrorKind::unknown_symbol, name, "nonterminal " + name + " has no productions", 0});
    } else {
      report.warnings.push_back("undefined nonterminal " + name + " is unreachable from " + source.start);
    }
  }

  // Cycle detection over the whole nonterminal graph.
  std::unordered_set<std::string> on_cycle;
  {
    enum class Colour { white, grey, black };
    std::unordered_map<std::string, Colour> colour;
    for (const auto& n : order) colour[n] = Colour::white;
    std::vector<std::string> path;
    std::function<void(const std::string&)> visit = [&](const std::string& nt) {
      colour[nt] = Colour::grey;
      path.push_back(nt);
      if (auto it = alts.find(nt); it != alts.end()) {
        for (auto pi : it->second) {
          for (const auto& s : prods[pi].rhs) {
            if (s.is_terminal()) continue;
            if (colour[s.name] == Colour::grey) {
              auto from = std::find(path.begin(), path.end(), s.name);
              for (auto p = from; p != path.end(); ++p) on_cycle.insert(*p);
            } else if (colour[s.name] == Colour::white) {
              visit(s.name);
            }
          }
        }
      }
      path.pop_back();
      colour[nt] = Colour::black;
    };
    for (const auto& n : order) {
      if (colour[n] == Colour::white) visit(n);
    }
  }
  for (const auto& name : order) {
    if (on_cycle.count(name)) {
      issues.push_back({GrammarErrorKind::cycle, name, "cycle detected on " + name, first_line[name]});
    }
  }

  for (const auto& name : order) {
    if (!alts.count(name) && !reachable.count(name)) continue;
    NonterminalDiagnostics nd;
    nd.name = name;
    if (auto it = alts.find(name); it != alts.end()) nd.production_count = it->second.size();
    if (auto it = sums.find(name); it != sums.end()) nd.probability_sum = it->second;
    nd.reachable = reachable.count(name) > 0;
    nd.on_cycle = on_cycle.count(name) > 0;
    if (!nd.reachable) report.warnings.push_back("nonterminal " + name + " is unreachable from " + source.start);
    report.nonterminals.push_back(std::move(nd));
  }

  std::stable_sort(issues.begin(), issues.end(),
                   [](const GrammarIssue& a, const GrammarIssue& b) { return a.kind < b.kind; });
  report.errors = std::move(issues);
  return report;
}

Pcfg::Pcfg(std::string start, std::vector<Production> productions)
    : Pcfg(GrammarSource{std::move(start), std::move(productions), {}}) {}

Pcfg::Pcfg(GrammarSource source) {
  const auto report = validate(source);
  if (!report.ok()) {
    const auto& e = report.errors.front();
    throw GrammarError(e.kind, e.message, e.symbol, e.line);
  }
  start_ = std::move(source.start);
  productions_ = std::move(source.productions);
  for (const auto& nt : report.nonterminals) nonterminals_.push_back(nt.name);
  for (std::size_t i = 0; i < productions_.size(); ++i) alternatives_[productions_[i].lhs].push_back(i);
}

std::span<const std::size_t> Pcfg::alternatives(std::string_view nonterminal) const {
  auto it = alternatives_.find(std::string(nonterminal));
  if (it == alternatives_.end()) return {};
  return it->second;
}

bool Pcfg::is_nonterminal(std::string_view name) const { return alternatives_.count(std::string(name)) > 0; }

ValidationReport validate(const Pcfg& g) {
  return validate(GrammarSource{g.start(), {g.productions().begin(), g.productions().end()}, {}});
}

namespace {

void enumerate_from(const Pcfg& g, std::vector<const Symbol*> pending, Derivation& partial, const Rational& prob,
                    std::vector<WeightedDerivation>& out) {
  // `pending` is a stack whose back is the leftmost unexpanded symbol.
  const auto yield_size = partial.yield.size();
  while (!pending.empty() && pending.back()->is_terminal()) {
    partial.yield.push_back(pending.back()->name);
    pending.pop_back();
  }
  if (pending.empty()) {
    out.push_back({partial, prob});
  } else {
    const Symbol* site = pending.back();
    pending.pop_back();
    for (auto pi : g.alternatives(site->name)) {
      auto next = pending;
      const auto& rhs = g.production(pi).rhs;
      for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) next.push_back(&*it);
      partial.steps.push_back(pi);
      enumerate_from(g, std::move(next), partial, prob * g.production(pi).prob, out);
      partial.steps.pop_back();
    }
  }
  partial.yield.resize(yield_size);
}

}  // namespace

std::vector<WeightedDerivation> enumerate_derivations(const Pcfg& g) {
  std::vector<WeightedDerivation> out;
  Derivation partial;
  // The root is a pseudo-site for the start symbol.
  const Symbol root = Symbol::nonterminal(g.start());
  enumerate_from(g, {&root}, partial, Rational(1), out);
  return out;
}

Derivation sample_derivation(const Pcfg& g, NoiseStream& noise) {
  Derivation d;
  const Symbol root = Symbol::nonterminal(g.start());
  std::vector<const Symbol*> pending{&root};
  while (!pending.empty()) {
    const Symbol* top = pending.back();
    pending.pop_back();
    if (top->is_terminal()) {
      d.yield.push_back(top->name);
      continue;
    }
    const auto u = noise.next();
    Rational cumulative = 0;
    std::size_t chosen = 0;
    bool found = false;
    for (auto pi : g.alternatives(top->name)) {
      cumulative += g.production(pi).prob;
      if (u < cumulative) {
        chosen = pi;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("noise value not covered by rule probabilities of " + top->name);
    d.steps.push_back(chosen);
    const auto& rhs = g.production(chosen).rhs;
    for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) pending.push_back(&*it);
  }
  return d;
}

Rational derivation_probability(const Pcfg& g, const Derivation& d) {
  site_spans(g, d);  // validates structure
  Rational p = 1;
  for (auto pi : d.steps) p *= g.production(pi).prob;
  return p;
}

std::vector<SiteSpan> site_spans(const Pcfg& g, const Derivation& d) {
  std::vector<SiteSpan> spans(d.steps.size());
  std::size_t pos = 0;
  std::size_t cursor = 0;
  std::function<void(const std::string&)> expand = [&](const std::string& nt) {
    if (pos >= d.steps.size()) throw std::invalid_argument("derivation ends before " + nt + " is expanded");
    const auto k = pos++;
    if (d.steps[k] >= g.productions().size()) throw std::invalid_argument("derivation names an unknown production");
    const auto& prod = g.production(d.steps[k]);
    if (prod.lhs != nt) {
      throw std::invalid_argument("derivation expands " + prod.lhs + " at a site holding " + nt);
    }
    const auto begin = cursor;
    for (const auto& s : prod.rhs) {
      if (s.is_terminal()) {
        if (cursor >= d.yield.size() || d.yield[cursor] != s.name) {
          throw std::invalid_argument("derivation yield disagrees with its rules");
        }
        ++cursor;
      } else {
        expand(s.name);
      }
    }
    spans[k] = {k, begin, cursor};
  };
  expand(g.start());
  if (pos != d.steps.size() || cursor != d.yield.size()) {
    throw std::invalid_argument("derivation has trailing steps or yield");
  }
  return spans;
}

}  // namespace pcfgscm
