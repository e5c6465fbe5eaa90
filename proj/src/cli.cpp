#include "pcfgscm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "pcfgscm/audit.hpp"
#include "pcfgscm/empirical.hpp"
#include "pcfgscm/grammar_dsl.hpp"
#include "pcfgscm/model_config.hpp"
#include "pcfgscm/paper_model.hpp"
#include "pcfgscm/report.hpp"

namespace pcfgscm {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  bool paper = false;
  std::string model_path;
  std::optional<std::string> alpha, beta_plus, beta_minus, z_reliability;
  std::string lexicon = "default";
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_flag("--paper", o.paper, "Use the built-in targeted-sentiment model");
  cmd->add_option("--model", o.model_path, "Model config file");
  cmd->add_option("--alpha", o.alpha, "Target/sentiment coupling in [-1,1], as p/q (default 0)");
  cmd->add_option("--beta-plus", o.beta_plus, "P(positive copula | positive sentiment), as p/q (default 1/2)");
  cmd->add_option("--beta-minus", o.beta_minus, "P(positive copula | negative sentiment), as p/q (default 1/2)");
  cmd->add_option("--z-reliability", o.z_reliability, "P(Z matches the target phrase), as p/q (default 1)");
  cmd->add_option("--lexicon", o.lexicon, "Built-in lexicon")->check(CLI::IsMember({"default", "rich"}));
}

Rational parse_param(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(flag) + " expects an integer or a p/q rational, got '" + text + "'");
  }
}

std::vector<Rational> parse_grid_flag(const std::string& text, const char* flag) {
  try {
    return parse_grid(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

PaperLexicon lexicon_of(const std::string& name) { return name == "rich" ? PaperLexicon::rich() : PaperLexicon{}; }

struct Loaded {
  Model model;
  ModelInfo info;
};

Loaded load_model(const ModelOptions& o) {
  if (o.paper == !o.model_path.empty()) throw UsageError("choose exactly one model source: --paper or --model PATH");
  if (!o.paper) {
    if (o.alpha || o.beta_plus || o.beta_minus || o.z_reliability || o.lexicon != "default") {
      throw UsageError("--alpha, --beta-plus, --beta-minus, --z-reliability and --lexicon apply to --paper only");
    }
    return {build_model(read_model_config(o.model_path)), {o.model_path, std::nullopt}};
  }
  PaperParams p;
  if (o.alpha) p.alpha = parse_param(*o.alpha, "--alpha");
  if (o.beta_plus) p.beta_plus = parse_param(*o.beta_plus, "--beta-plus");
  if (o.beta_minus) p.beta_minus = parse_param(*o.beta_minus, "--beta-minus");
  const Rational z = o.z_reliability ? parse_param(*o.z_reliability, "--z-reliability") : Rational(1);
  auto pm = make_paper_model(p, lexicon_of(o.lexicon), z);
  return {std::move(pm.model), {"paper", p}};
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// `x2=was not`, `X2="was not"` or `x2='was not'`; the name matches span
// variables case-insensitively.
Intervention parse_do(const std::string& text, const Model& model) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--do expects VAR=VALUE, got '" + text + "'");
  const auto name = lower(text.substr(0, eq));
  auto value = text.substr(eq + 1);
  if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
    value = value.substr(1, value.size() - 2);
  }
  for (const auto& s : model.scm().spans) {
    if (lower(s.name) == name) return {s.name, value};
  }
  throw UsageError("--do: '" + text.substr(0, eq) + "' is not a span variable");
}

struct Output {
  std::string path;
  std::string format;
};

void add_output_options(CLI::App* cmd, Output& o, const std::string& default_format, bool csv_allowed = true) {
  o.format = default_format;
  cmd->add_option("--out", o.path, "Write to this file instead of standard output");
  auto* f = cmd->add_option("--format", o.format, "Output format")->capture_default_str();
  if (csv_allowed) {
    f->check(CLI::IsMember({"json", "text", "csv"}));
  } else {
    f->check(CLI::IsMember({"json", "text"}));
  }
}

void emit(const Output& o, const std::string& bytes, std::ostream& out) {
  if (o.path.empty()) {
    out << bytes;
    return;
  }
  std::ofstream file(o.path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + o.path);
  file << bytes;
  if (!file) throw std::runtime_error("failed writing " + o.path);
}

std::string validation_json(const ValidationReport& r, const std::vector<std::string>& model_errors) {
  nlohmann::ordered_json j;
  j["start"] = r.start;
  j["nonterminals"] = nlohmann::ordered_json::array();
  for (const auto& n : r.nonterminals) {
    j["nonterminals"].push_back({{"name", n.name},
                                 {"productions", n.production_count},
                                 {"probability_sum", to_string(n.probability_sum)},
                                 {"reachable", n.reachable},
                                 {"on_cycle", n.on_cycle}});
  }
  j["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : r.errors) {
    j["errors"].push_back({{"kind", to_string(e.kind)}, {"symbol", e.symbol}, {"line", e.line}, {"message", e.message}});
  }
  for (const auto& m : model_errors) j["errors"].push_back({{"kind", "model"}, {"message", m}});
  j["warnings"] = r.warnings;
  j["verdict"] = r.ok() && model_errors.empty() ? "ok" : "fail";
  return j.dump(2) + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact UIF and counterfactual-invariance analysis for grammar-based causal models", "pcfgscm"};
  app.require_subcommand(1);
  std::function<std::string()> action;

  // exact
  ModelOptions exact_model;
  Output exact_out;
  auto* exact = app.add_subcommand("exact", "Joint table, UIF, CI and quadrant reports");
  add_model_options(exact, exact_model);
  add_output_options(exact, exact_out, "text");
  exact->callback([&] {
    action = [&] {
      const auto m = load_model(exact_model);
      std::ostringstream os;
      render_exact(m.model, m.info, parse_format(exact_out.format), os);
      return os.str();
    };
  });

  // sweep
  std::string sweep_alpha = "-1..1/0.5", sweep_bp = "0..1/0.25", sweep_bm = "0..1/0.25", sweep_lexicon = "default";
  Output sweep_out;
  auto* sw = app.add_subcommand("sweep", "UIF/CI verdicts against closed-form predictions over a parameter grid");
  sw->add_option("--alpha", sweep_alpha, "Grid lo..hi/step or a single value")->capture_default_str();
  sw->add_option("--beta-plus", sweep_bp, "Grid lo..hi/step or a single value")->capture_default_str();
  sw->add_option("--beta-minus", sweep_bm, "Grid lo..hi/step or a single value")->capture_default_str();
  sw->add_option("--lexicon", sweep_lexicon, "Built-in lexicon")->check(CLI::IsMember({"default", "rich"}));
  add_output_options(sw, sweep_out, "csv");
  sw->callback([&] {
    action = [&] {
      const auto rows = sweep(parse_grid_flag(sweep_alpha, "--alpha"), parse_grid_flag(sweep_bp, "--beta-plus"),
                              parse_grid_flag(sweep_bm, "--beta-minus"), lexicon_of(sweep_lexicon));
      std::ostringstream os;
      render_sweep(rows, parse_format(sweep_out.format), os);
      return os.str();
    };
  });

  // generate
  ModelOptions gen_model;
  std::uint64_t gen_seed = 0;
  std::size_t gen_n = 1000;
  std::string gen_path;
  auto* gen = app.add_subcommand("generate", "Sample a JSON Lines corpus");
  add_model_options(gen, gen_model);
  gen->add_option("--seed", gen_seed, "Random seed")->required();
  gen->add_option("-n,--count", gen_n, "Number of records")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--out", gen_path, "Write to this file instead of standard output");
  gen->callback([&] {
    action = [&] {
      const auto m = load_model(gen_model);
      std::ostringstream os;
      write_jsonl(m.model, generate_dataset(m.model, gen_n, gen_seed), os);
      return os.str();
    };
  });

  // audit
  std::string audit_input;
  std::vector<std::string> audit_features, audit_labels;
  Output audit_out;
  auto* au = app.add_subcommand("audit", "Chi-square and mutual-information audit of a JSON Lines corpus");
  au->add_option("input", audit_input, "Dataset file (default: standard input)");
  au->add_option("--feature", audit_features, "Feature field(s)")->required()->delimiter(',');
  au->add_option("--label", audit_labels, "Label field(s)")->required()->delimiter(',');
  add_output_options(au, audit_out, "text");
  au->callback([&] {
    action = [&] {
      Dataset data;
      if (audit_input.empty() || audit_input == "-") {
        data = read_jsonl(in);
      } else {
        std::ifstream file(audit_input, std::ios::binary);
        if (!file) throw std::runtime_error("cannot read " + audit_input);
        data = read_jsonl(file);
      }
      std::vector<EmpiricalVerdict> verdicts;
      for (const auto& l : audit_labels) {
        for (const auto& f : audit_features) verdicts.push_back(empirical_audit(data, f, l));
      }
      std::ostringstream os;
      render_empirical(verdicts, parse_format(audit_out.format), os);
      return os.str();
    };
  });

  // counterfactual
  ModelOptions cf_model;
  std::string cf_do;
  Output cf_out;
  auto* cf = app.add_subcommand("counterfactual", "Unit-level counterfactual table for one intervention");
  add_model_options(cf, cf_model);
  cf->add_option("--do", cf_do, "Intervention VAR=VALUE, e.g. x2=\"was not\"")->required();
  add_output_options(cf, cf_out, "text");
  cf->callback([&] {
    action = [&] {
      const auto m = load_model(cf_model);
      const auto i = parse_do(cf_do, m.model);
      std::ostringstream os;
      render_counterfactual(m.model, m.info, i, counterfactual_table(m.model, i), parse_format(cf_out.format), os);
      return os.str();
    };
  });

  // validate
  ModelOptions val_model;
  std::string val_grammar;
  Output val_out;
  int val_status = kExitOk;
  auto* val = app.add_subcommand("validate", "Grammar diagnostics for a model or a bare grammar file");
  add_model_options(val, val_model);
  val->add_option("--grammar", val_grammar, "Grammar file in the production DSL");
  add_output_options(val, val_out, "text", false);
  val->callback([&] {
    action = [&] {
      GrammarSource source;
      std::optional<ModelConfig> config;
      if (!val_grammar.empty()) {
        if (val_model.paper || !val_model.model_path.empty()) {
          throw UsageError("choose one of --grammar, --model or --paper");
        }
        std::ifstream file(val_grammar, std::ios::binary);
        if (!file) throw std::runtime_error("cannot read " + val_grammar);
        std::ostringstream text;
        text << file.rdbuf();
        source = parse_grammar_source(text.str());
      } else if (!val_model.model_path.empty() && !val_model.paper) {
        config = read_model_config(val_model.model_path);
        source = config->grammar;
      } else {
        const auto m = load_model(val_model);
        const auto& g = m.model.grammar();
        source = {g.start(), {g.productions().begin(), g.productions().end()}, {}};
      }
      const auto report = validate(source);
      std::vector<std::string> model_errors;
      if (report.ok() && config) {
        try {
          build_model(*config);
        } catch (const ModelError& e) {
          model_errors.push_back(e.what());
        }
      }
      if (!report.ok() || !model_errors.empty()) val_status = kExitInvalid;
      if (parse_format(val_out.format) == Format::json) return validation_json(report, model_errors);
      std::string text = report.to_text();
      for (const auto& e : model_errors) text += "model error: " + e + "\n";
      return text;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const Output* dest = nullptr;
  if (exact->parsed()) dest = &exact_out;
  if (sw->parsed()) dest = &sweep_out;
  if (au->parsed()) dest = &audit_out;
  if (cf->parsed()) dest = &cf_out;
  if (val->parsed()) dest = &val_out;
  const Output gen_dest{gen_path, "jsonl"};
  if (gen->parsed()) dest = &gen_dest;

  try {
    emit(*dest, action(), out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GrammarError& e) {
    err << "grammar error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return val->parsed() ? val_status : kExitOk;
}

}  // namespace pcfgscm
