#pragma once

#include <string>
#include <string_view>

#include "pcfgscm/pcfg.hpp"

namespace pcfgscm {

// Grammar text format, one production per line:
//
//   start: S                      # optional; otherwise the first lhs
//   S -> Zpizza Ypos : 3/8
//   Zpizza -> 'the pizza' : 1
//
// Unquoted symbols are nonterminals, single-quoted ones are terminals
// (`\'` and `\\` escape inside quotes). Probabilities are integers or `p/q`.
// Rule order matters: alternatives are selected by cumulative probability in
// declaration order.

/// Reads the text without semantic checks. Throws GrammarError(syntax) with
/// line and column on malformed input.
GrammarSource parse_grammar_source(std::string_view text);

/// parse_grammar_source followed by full validation.
Pcfg parse_grammar(std::string_view text);

std::string print_grammar(const Pcfg& g);

}  // namespace pcfgscm
