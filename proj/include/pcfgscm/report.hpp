#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pcfgscm/audit.hpp"
#include "pcfgscm/causal.hpp"
#include "pcfgscm/empirical.hpp"
#include "pcfgscm/paper_model.hpp"

namespace pcfgscm {

enum class Format { json, text, csv };

/// Throws std::invalid_argument for anything but json, text or csv.
Format parse_format(std::string_view name);

/// Describes where a model came from, echoed in report headers.
struct ModelInfo {
  std::string source;                 // "paper" or the config path
  std::optional<PaperParams> params;  // built-in model only
};

/// Joint table, UIF under both definitions, witness pairs, CI and the
/// quadrant classification. CSV output is the joint table alone.
void render_exact(const Model& model, const ModelInfo& info, Format format, std::ostream& os);

void render_sweep(const std::vector<SweepRow>& rows, Format format, std::ostream& os);

void render_empirical(const std::vector<EmpiricalVerdict>& verdicts, Format format, std::ostream& os);

/// One row per noise box of counterfactual_table().
void render_counterfactual(const Model& model, const ModelInfo& info, const Intervention& intervention,
                           const std::vector<CounterfactualRow>& rows, Format format, std::ostream& os);

/// Aligned plain-text table: columns separated by two spaces, header
/// underlined with dashes, no trailing whitespace.
std::string text_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace pcfgscm
