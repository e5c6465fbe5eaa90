#include "pcfgscm/grammar_dsl.hpp"

#include <cctype>
#include <sstream>

namespace pcfgscm {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool is_symbol_char(char c) {
  return !is_space(c) && c != '\'' && c != ':' && c != '#' && c != '\n';
}

class LineReader {
 public:
  LineReader(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw GrammarError(GrammarErrorKind::syntax, message, {}, line_no_, pos_ + 1);
  }

  void skip_space() {
    while (pos_ < line_.size() && is_space(line_[pos_])) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= line_.size() || line_[pos_] == '#';
  }

  bool consume(std::string_view token) {
    skip_space();
    if (line_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < line_.size() ? line_[pos_] : '\0';
  }

  std::string identifier() {
    skip_space();
    const auto begin = pos_;
    while (pos_ < line_.size() && is_symbol_char(line_[pos_])) {
      if (line_.substr(pos_, 2) == "->") break;
      ++pos_;
    }
    if (pos_ == begin) fail("expected a symbol name");
    return std::string(line_.substr(begin, pos_ - begin));
  }

  std::string quoted() {
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != '\'') fail("expected a quoted terminal");
    const auto open = pos_++;
    std::string out;
    while (pos_ < line_.size() && line_[pos_] != '\'') {
      if (line_[pos_] == '\\' && pos_ + 1 < line_.size()) ++pos_;
      out.push_back(line_[pos_++]);
    }
    if (pos_ >= line_.size()) {
      pos_ = open;
      fail("unterminated quoted terminal");
    }
    ++pos_;
    return out;
  }

  std::string word() {
    skip_space();
    const auto begin = pos_;
    while (pos_ < line_.size() && !is_space(line_[pos_]) && line_[pos_] != '#') ++pos_;
    return std::string(line_.substr(begin, pos_ - begin));
  }

  std::size_t column() const { return pos_ + 1; }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

std::string quote_terminal(const std::string& name) {
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

GrammarSource parse_grammar_source(std::string_view text) {
  GrammarSource source;
  bool explicit_start = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    LineReader reader(line, line_no);
    if (reader.at_end()) continue;

    if (reader.consume("start:")) {
      if (explicit_start) reader.fail("duplicate start: header");
      if (!source.productions.empty()) reader.fail("start: header must precede all productions");
      source.start = reader.identifier();
      if (!reader.at_end()) reader.fail("unexpected text after start symbol");
      explicit_start = true;
      continue;
    }

    Production prod;
    prod.lhs = reader.identifier();
    if (!reader.consume("->")) reader.fail("expected '->'");
    while (true) {
      const char c = reader.peek();
      if (c == ':' || c == '\0' || c == '#') break;
      if (c == '\'') {
        prod.rhs.push_back(Symbol::terminal(reader.quoted()));
      } else {
        prod.rhs.push_back(Symbol::nonterminal(reader.identifier()));
      }
    }
    if (prod.rhs.empty()) reader.fail("empty right-hand side");
    if (!reader.consume(":")) reader.fail("expected ': probability'");
    const auto prob_column = reader.column();
    const auto prob_text = reader.word();
    try {
      prod.prob = parse_rational(prob_text);
    } catch (const std::invalid_argument& e) {
      throw GrammarError(GrammarErrorKind::syntax, e.what(), {}, line_no, prob_column);
    }
    if (!reader.at_end()) reader.fail("unexpected text after probability");

    if (source.start.empty()) source.start = prod.lhs;
    source.productions.push_back(std::move(prod));
    source.lines.push_back(line_no);
  }
  return source;
}

Pcfg parse_grammar(std::string_view text) { return Pcfg(parse_grammar_source(text)); }

std::string print_grammar(const Pcfg& g) {
  std::ostringstream os;
  os << "start: " << g.start() << "\n";
  for (const auto& p : g.productions()) {
    os << p.lhs << " ->";
    for (const auto& s : p.rhs) os << " " << (s.is_terminal() ? quote_terminal(s.name) : s.name);
    os << " : " << to_short_string(p.prob) << "\n";
  }
  return os.str();
}

}  // namespace pcfgscm
