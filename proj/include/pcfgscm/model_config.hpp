#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pcfgscm/causal.hpp"
#include "pcfgscm/pcfg.hpp"

namespace pcfgscm {

// Model config format:
//
//   [grammar]
//   S -> NP Adj : 1            # inline grammar text, or a single line
//   ...                        #   file = grammar.pcfg   (relative to the config)
//
//   [spans]
//   X1 = NP                    # ordered; alternatives with |, e.g. A | B
//   X2 = Adj
//
//   [mechanism f_Y]
//   label = Y
//   parents = X2
//   outputs = Pos, Neg
//   'good' -> Pos                  # deterministic row
//   'bad' -> Pos, Neg : 1/4, 3/4   # stochastic row
//
// Row keys are single-quoted parent values in `parents` order; a mechanism
// with no parents writes rows as `-> ...`. Outputs may be bare or quoted.

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ModelConfig {
  GrammarSource grammar;
  ScmSpec scm;
};

/// Syntax only; grammar line numbers refer to the config text. Throws
/// ConfigError, or GrammarError for malformed grammar lines.
ModelConfig parse_model_config(std::string_view text, const std::filesystem::path& base_dir = ".");

ModelConfig read_model_config(const std::filesystem::path& path);

/// Full validation: Pcfg construction (GrammarError), then Model (ModelError).
Model build_model(const ModelConfig& config);

}  // namespace pcfgscm
