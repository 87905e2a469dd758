#pragma once

// JSON and text/SVG renderings of term sets, models and reports.
//
//   term set:    [[], [1], [2], [1, 2]]            (1-based variables)
//   bandwidths:  {"1": 6, "2": 4}
//   report:      {"variance": x, "gsi": [{"term": [...], "rho": x}, ...],
//                 "ranking": [x, ...]}
//   summary:     {"metric", "median", "q1", "q3", "repetitions", "failures"}

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anova/datasets.hpp"
#include "anova/model.hpp"
#include "anova/terms.hpp"

namespace anova::io {

using nlohmann::json;

json to_json(const Term& term);
Term term_from_json(const json& j, std::size_t dimension);

json to_json(const TermSet& terms);
TermSet term_set_from_json(const json& j, std::size_t dimension);

json to_json(const BandwidthProfile& bandwidths);
BandwidthProfile bandwidths_from_json(const json& j);

json to_json(const Normalization& stats);
Normalization normalization_from_json(const json& j);

// A fitted model together with what is needed to apply it to raw data.
struct ModelFile {
  Model model;
  std::optional<Normalization> normalization;
  std::vector<std::string> columns;
  std::string target_name;
};

json to_json(const ModelFile& file);
ModelFile model_file_from_json(const json& j);

json to_json(const SensitivityReport& report);
SensitivityReport report_from_json(const json& j);

json to_json(const EvaluationSummary& summary);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// "{1,2}" style label, 1-based.
std::string term_label(const Term& term);

// Aligned text table of the ranking followed by GSI sorted by rho.
std::string format_report_table(const SensitivityReport& report);

// Static SVG bar charts of r(i) and rho(u), with an optional dashed
// threshold line.
std::string ranking_svg(const std::vector<double>& ranking,
                        std::optional<double> threshold = std::nullopt);
std::string gsi_svg(const SensitivityReport& report,
                    std::optional<double> threshold = std::nullopt);

}  // namespace anova::io
