#include "pcfgscm/paper_model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pcfgscm {

namespace {

bool contains(const std::vector<std::string>& list, const std::string& value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

bool overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& v) { return contains(b, v); });
}

void add_lexical_rules(std::vector<Production>& out, const char* lhs, const std::vector<std::string>& phrases) {
  if (phrases.empty()) throw std::invalid_argument(std::string("empty lexicon entry for ") + lhs);
  if (std::set<std::string>(phrases.begin(), phrases.end()).size() != phrases.size()) {
    throw std::invalid_argument(std::string("repeated phrase in lexicon entry for ") + lhs);
  }
  const Rational p(1, phrases.size());
  for (const auto& w : phrases) out.push_back({lhs, {Symbol::terminal(w)}, p});
}

std::vector<std::string> union_in_order(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto out = a;
  for (const auto& v : b) {
    if (!contains(out, v)) out.push_back(v);
  }
  return out;
}

}  // namespace

PaperLexicon PaperLexicon::rich() {
  PaperLexicon lex;
  lex.cop_pos = {"is", "was", "is universally agreed to be"};
  lex.cop_neg = {"isn't", "wasn't", "was the furthest possible thing from"};
  lex.adj_pos = {"great", "delicious"};
  lex.adj_neg = {"disappointing", "totally unappetizing"};
  return lex;
}

bool PaperLexicon::disjoint() const {
  return !overlap(pizza, sushi) && !overlap(cop_pos, cop_neg) && !overlap(adj_pos, adj_neg);
}

Pcfg build_paper_grammar(const PaperParams& params, const PaperLexicon& lexicon) {
  const auto& [alpha, bp, bm] = params;
  if (alpha < -1 || alpha > 1) throw std::invalid_argument("alpha must lie in [-1,1], got " + to_short_string(alpha));
  if (bp < 0 || bp > 1) throw std::invalid_argument("beta+ must lie in [0,1], got " + to_short_string(bp));
  if (bm < 0 || bm > 1) throw std::invalid_argument("beta- must lie in [0,1], got " + to_short_string(bm));

  using namespace paper;
  auto nt = [](const char* name) { return Symbol::nonterminal(name); };
  const Rational same = (1 + alpha) / 4;
  const Rational swapped = (1 - alpha) / 4;
  std::vector<Production> rules{
      {kStart, {nt(kZPizza), nt(kYPos)}, same},
      {kStart, {nt(kZSushi), nt(kYNeg)}, same},
      {kStart, {nt(kZPizza), nt(kYNeg)}, swapped},
      {kStart, {nt(kZSushi), nt(kYPos)}, swapped},
      {kYPos, {nt(kCopPos), nt(kAdjPos)}, bp},
      {kYPos, {nt(kCopNeg), nt(kAdjNeg)}, 1 - bp},
      {kYNeg, {nt(kCopPos), nt(kAdjNeg)}, bm},
      {kYNeg, {nt(kCopNeg), nt(kAdjPos)}, 1 - bm},
  };
  add_lexical_rules(rules, kZPizza, lexicon.pizza);
  add_lexical_rules(rules, kZSushi, lexicon.sushi);
  add_lexical_rules(rules, kCopPos, lexicon.cop_pos);
  add_lexical_rules(rules, kCopNeg, lexicon.cop_neg);
  add_lexical_rules(rules, kAdjPos, lexicon.adj_pos);
  add_lexical_rules(rules, kAdjNeg, lexicon.adj_neg);
  return Pcfg(kStart, std::move(rules));
}

ScmSpec paper_scm(const PaperLexicon& lexicon, const Rational& z_reliability) {
  if (z_reliability < 0 || z_reliability > 1) throw std::invalid_argument("z reliability must lie in [0,1]");
  using namespace paper;
  ScmSpec scm;
  scm.spans = {{"X1", {kZPizza, kZSushi}}, {"X2", {kCopPos, kCopNeg}}, {"X3", {kAdjPos, kAdjNeg}}};

  // A phrase listed under both polarities counts as positive.
  Mechanism f_y{"f_Y", {"X2", "X3"}, {"Pos", "Neg"}, {}};
  for (const auto& cop : union_in_order(lexicon.cop_pos, lexicon.cop_neg)) {
    for (const auto& adj : union_in_order(lexicon.adj_pos, lexicon.adj_neg)) {
      const bool positive = contains(lexicon.cop_pos, cop) == contains(lexicon.adj_pos, adj);
      f_y.rows[{cop, adj}] = positive ? std::vector<Rational>{1, 0} : std::vector<Rational>{0, 1};
    }
  }

  Mechanism f_z{"f_Z", {"X1"}, {"Pizza", "Sushi"}, {}};
  for (const auto& np : union_in_order(lexicon.pizza, lexicon.sushi)) {
    const bool pizza = contains(lexicon.pizza, np);
    f_z.rows[{np}] = pizza ? std::vector<Rational>{z_reliability, 1 - z_reliability}
                           : std::vector<Rational>{1 - z_reliability, z_reliability};
  }

  scm.labels = {{"Y", std::move(f_y)}, {"Z", std::move(f_z)}};
  return scm;
}

PaperModel make_paper_model(const PaperParams& params, const PaperLexicon& lexicon, const Rational& z_reliability) {
  return {params, lexicon, Model(build_paper_grammar(params, lexicon), paper_scm(lexicon, z_reliability))};
}

}  // namespace pcfgscm
