#include "pcfgscm/model_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include "pcfgscm/grammar_dsl.hpp"

namespace pcfgscm {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Cuts a trailing `#` comment that is not inside single quotes.
std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (quoted && line[i] == '\\') {
      ++i;
    } else if (line[i] == '\'') {
      quoted = !quoted;
    } else if (!quoted && line[i] == '#') {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

class Scanner {
 public:
  Scanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(line_, message); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ == text_.size();
  }
  bool consume(std::string_view t) {
    skip();
    if (text_.substr(pos_, t.size()) != t) return false;
    pos_ += t.size();
    return true;
  }

  std::string quoted() {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != '\'') fail("expected a quoted value");
    std::string out;
    for (++pos_; pos_ < text_.size(); ++pos_) {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        out += text_[++pos_];
      } else if (text_[pos_] == '\'') {
        ++pos_;
        return out;
      } else {
        out += text_[pos_];
      }
    }
    fail("unterminated quote");
  }

  // Bare word or quoted value.
  std::string value() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '\'') return quoted();
    const auto begin = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ':' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ == begin) fail("expected a value");
    return std::string(text_.substr(begin, pos_ - begin));
  }

  std::string rest() {
    skip();
    auto out = trim(text_.substr(pos_));
    pos_ = text_.size();
    return out;
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::vector<std::string> value_list(std::string_view text, std::size_t line) {
  Scanner s(text, line);
  std::vector<std::string> out;
  if (s.done()) return out;
  do {
    out.push_back(s.value());
  } while (s.consume(","));
  if (!s.done()) s.fail("expected ',' between values");
  return out;
}

struct PendingMechanism {
  std::size_t line = 0;
  std::string name;
  std::optional<std::string> label;
  std::optional<std::vector<std::string>> parents;
  std::optional<std::vector<std::string>> outputs;
  struct Row {
    std::size_t line;
    std::vector<std::string> key;
    std::vector<std::string> outs;
    std::vector<Rational> probs;  // empty: point mass on outs[0]
  };
  std::vector<Row> rows;
};

PendingMechanism::Row parse_row(std::string_view text, std::size_t line) {
  Scanner s(text, line);
  PendingMechanism::Row row{line, {}, {}, {}};
  if (!s.consume("->")) {
    do {
      row.key.push_back(s.quoted());
    } while (s.consume(","));
    if (!s.consume("->")) s.fail("expected '->' after the parent values");
  }
  do {
    row.outs.push_back(s.value());
  } while (s.consume(","));
  if (s.consume(":")) {
    for (const auto& p : value_list(s.rest(), line)) {
      try {
        row.probs.push_back(parse_rational(p));
      } catch (const std::invalid_argument&) {
        s.fail("bad probability '" + p + "'");
      }
    }
    if (row.probs.size() != row.outs.size()) s.fail("row lists a different number of outputs and probabilities");
  } else if (!s.done()) {
    s.fail("expected ':' before probabilities");
  } else if (row.outs.size() != 1) {
    s.fail("a row without probabilities must name exactly one output");
  }
  return row;
}

LabelVar finish(const PendingMechanism& p) {
  if (!p.label) throw ConfigError(p.line, "mechanism " + p.name + " needs 'label = ...'");
  if (!p.outputs) throw ConfigError(p.line, "mechanism " + p.name + " needs 'outputs = ...'");
  LabelVar var{*p.label, {p.name, p.parents.value_or(std::vector<std::string>{}), *p.outputs, {}}};
  auto& m = var.mechanism;
  for (const auto& r : p.rows) {
    if (r.key.size() != m.parents.size()) {
      throw ConfigError(r.line, "row has " + std::to_string(r.key.size()) + " parent values, mechanism has " +
                                    std::to_string(m.parents.size()) + " parents");
    }
    std::vector<Rational> dist(m.outputs.size(), Rational(0));
    for (std::size_t i = 0; i < r.outs.size(); ++i) {
      const auto it = std::find(m.outputs.begin(), m.outputs.end(), r.outs[i]);
      if (it == m.outputs.end()) throw ConfigError(r.line, "'" + r.outs[i] + "' is not a declared output");
      dist[it - m.outputs.begin()] += r.probs.empty() ? Rational(1) : r.probs[i];
    }
    if (!m.rows.emplace(r.key, std::move(dist)).second) throw ConfigError(r.line, "duplicate row");
  }
  return var;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ModelConfig parse_model_config(std::string_view text, const std::filesystem::path& base_dir) {
  enum class Section { none, grammar, spans, mechanism };
  Section section = Section::none;
  std::vector<std::string> lines;
  {
    std::string all(text);
    std::istringstream in(all);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }

  // Grammar lines keep their config line numbers: everything else is blanked.
  std::vector<std::string> grammar_lines(lines.size());
  bool has_grammar = false;
  std::optional<std::pair<std::size_t, std::string>> grammar_file;
  ModelConfig config;
  std::vector<PendingMechanism> mechanisms;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto no = i + 1;
    const auto line = trim(strip_comment(lines[i]));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(no, "unterminated section header");
      const auto name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name == "grammar") {
        if (has_grammar) throw ConfigError(no, "duplicate [grammar] section");
        has_grammar = true;
        section = Section::grammar;
      } else if (name == "spans") {
        if (!config.scm.spans.empty()) throw ConfigError(no, "duplicate [spans] section");
        section = Section::spans;
      } else if (name.rfind("mechanism", 0) == 0 && name.size() > 9 && std::isspace(static_cast<unsigned char>(name[9]))) {
        section = Section::mechanism;
        mechanisms.push_back({});
        mechanisms.back().line = no;
        mechanisms.back().name = trim(std::string_view(name).substr(9));
      } else {
        throw ConfigError(no, "unknown section [" + name + "]");
      }
      continue;
    }

    switch (section) {
      case Section::none:
        throw ConfigError(no, "text before the first section");
      case Section::grammar: {
        if (line.rfind("file", 0) == 0 && line.find('=') != std::string::npos && trim(line.substr(0, line.find('='))) == "file") {
          grammar_file.emplace(no, trim(line.substr(line.find('=') + 1)));
        } else {
          grammar_lines[i] = lines[i];
        }
        break;
      }
      case Section::spans: {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(no, "expected 'name = Nonterminal'");
        SpanVar v{trim(line.substr(0, eq)), {}};
        std::istringstream alts(line.substr(eq + 1));
        for (std::string alt; std::getline(alts, alt, '|');) {
          alt = trim(alt);
          if (alt.empty()) throw ConfigError(no, "empty nonterminal in span " + v.name);
          v.nonterminals.push_back(alt);
        }
        if (v.name.empty() || v.nonterminals.empty()) throw ConfigError(no, "expected 'name = Nonterminal'");
        config.scm.spans.push_back(std::move(v));
        break;
      }
      case Section::mechanism: {
        auto& m = mechanisms.back();
        if (line.find("->") != std::string::npos) {
          m.rows.push_back(parse_row(line, no));
          break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(no, "expected 'key = value' or a row with '->'");
        const auto key = trim(line.substr(0, eq));
        const auto value = line.substr(eq + 1);
        if (key == "label") {
          m.label = trim(value);
        } else if (key == "parents") {
          m.parents = value_list(value, no);
        } else if (key == "outputs") {
          m.outputs = value_list(value, no);
        } else {
          throw ConfigError(no, "unknown mechanism key '" + key + "'");
        }
        break;
      }
    }
  }

  if (!has_grammar) throw ConfigError(lines.size(), "missing [grammar] section");
  const bool inline_grammar = std::any_of(grammar_lines.begin(), grammar_lines.end(),
                                          [](const std::string& l) { return !trim(strip_comment(l)).empty(); });
  if (grammar_file) {
    if (inline_grammar) throw ConfigError(grammar_file->first, "[grammar] has both a file and inline rules");
    const auto path = std::filesystem::path(grammar_file->second).is_absolute()
                          ? std::filesystem::path(grammar_file->second)
                          : base_dir / grammar_file->second;
    config.grammar = parse_grammar_source(read_file(path));
  } else {
    std::string joined;
    for (const auto& l : grammar_lines) joined += l + "\n";
    config.grammar = parse_grammar_source(joined);
  }
  if (config.scm.spans.empty()) throw ConfigError(lines.size(), "missing [spans] section");
  for (const auto& m : mechanisms) config.scm.labels.push_back(finish(m));
  return config;
}

ModelConfig read_model_config(const std::filesystem::path& path) {
  return parse_model_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

Model build_model(const ModelConfig& config) { return Model(Pcfg(config.grammar), config.scm); }

}  // namespace pcfgscm
