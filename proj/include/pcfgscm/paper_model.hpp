#pragma once

#include <string>
#include <vector>

#include "pcfgscm/causal.hpp"
#include "pcfgscm/pcfg.hpp"
#include "pcfgscm/rational.hpp"

namespace pcfgscm {

// The targeted-sentiment toy model: sentences (X1, X2, X3) = (target noun
// phrase, copula, adjectival phrase), target label Z read from X1, sentiment
// label Y read from (X2, X3).
//
//   S    -> Zpizza Ypos  : (1+alpha)/4      Ypos -> CopPos AdjPPos : beta+
//         | Zsushi Yneg  : (1+alpha)/4           | CopNeg AdjPNeg : 1-beta+
//         | Zpizza Yneg  : (1-alpha)/4      Yneg -> CopPos AdjPNeg : beta-
//         | Zsushi Ypos  : (1-alpha)/4           | CopNeg AdjPPos : 1-beta-

namespace paper {
inline constexpr const char* kStart = "S";
inline constexpr const char* kZPizza = "Zpizza";
inline constexpr const char* kZSushi = "Zsushi";
inline constexpr const char* kYPos = "Ypos";
inline constexpr const char* kYNeg = "Yneg";
inline constexpr const char* kCopPos = "CopPos";
inline constexpr const char* kCopNeg = "CopNeg";
inline constexpr const char* kAdjPos = "AdjPPos";
inline constexpr const char* kAdjNeg = "AdjPNeg";
}  // namespace paper

/// Terminal strings emitted by each preterminal; alternatives within a list
/// are equiprobable.
struct PaperLexicon {
  std::vector<std::string> pizza{"the pizza"};
  std::vector<std::string> sushi{"the sushi"};
  std::vector<std::string> cop_pos{"was"};
  std::vector<std::string> cop_neg{"was not"};
  std::vector<std::string> adj_pos{"delicious"};
  std::vector<std::string> adj_neg{"greasy"};

  /// Multi-phrase lexicon with several copulas and adjectival phrases per class.
  static PaperLexicon rich();

  /// True when the label-linked classes (pizza/sushi, cop_pos/cop_neg,
  /// adj_pos/adj_neg) share no phrase. The closed-form independence
  /// conditions are exact only in that case.
  bool disjoint() const;
};

struct PaperParams {
  Rational alpha{0};
  Rational beta_plus{1, 2};
  Rational beta_minus{1, 2};
};

/// Throws std::invalid_argument when alpha is outside [-1,1] or a beta outside [0,1].
Pcfg build_paper_grammar(const PaperParams& params, const PaperLexicon& lexicon = {});

/// Spans X1, X2, X3 and labels Y (f_Y) then Z (f_Z). Y is Pos exactly when the
/// copula and adjective polarities agree. Z is Pizza for pizza phrases with
/// probability `z_reliability` (1 by default, i.e. deterministic).
ScmSpec paper_scm(const PaperLexicon& lexicon = {}, const Rational& z_reliability = Rational(1));

struct PaperModel {
  PaperParams params;
  PaperLexicon lexicon;
  Model model;
};

PaperModel make_paper_model(const PaperParams& params, const PaperLexicon& lexicon = {},
                            const Rational& z_reliability = Rational(1));

}  // namespace pcfgscm
