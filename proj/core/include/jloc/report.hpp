#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jloc/evaluation.hpp"

namespace jloc {

nlohmann::ordered_json report_to_json(const EvalReport& report);
/// Aligned plain-text table: aggregate metrics per D, then a per-sequence
/// breakdown at the reference D.
std::string report_table(const EvalReport& report);
/// Writes report.json and report.txt into `dir`.
void write_report(const std::filesystem::path& dir, const EvalReport& report);

struct RobustnessRow {
  std::string label;  // e.g. "5-20"
  double fpr = 0.0;
  double fnr = 0.0;
  EvalReport report;
};
nlohmann::ordered_json robustness_to_json(const std::vector<RobustnessRow>& rows);
std::string robustness_table(const std::vector<RobustnessRow>& rows);

/// manifest.json: artifact version, config digest, input digests and output
/// digests. Carries no timestamps so identical runs give identical bytes.
void write_manifest(const std::filesystem::path& dir, const std::string& config_text,
                    const std::map<std::string, std::string>& input_digests,
                    const std::vector<std::filesystem::path>& outputs);

/// Writes text to a file, throwing InputError when it cannot be created.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace jloc
