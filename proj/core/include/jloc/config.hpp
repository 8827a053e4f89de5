#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jloc/detector.hpp"
#include "jloc/evaluation.hpp"
#include "jloc/noise.hpp"
#include "jloc/projection.hpp"

namespace jloc {

/// Everything a run needs. Serialized as flat "key = value" text; see
/// RunConfig::keys() for the accepted keys.
struct RunConfig {
  DetectorParams detector;
  double delta_a_deg = 5.0;  // kept in degrees so the text form round-trips

  std::vector<double> thresholds = default_thresholds();
  double reference_d = 5.0;
  bool ace_tp_only = false;

  double fpr = 0.0;
  double fnr = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> confusion_classes{"sidewalk", "parking", "other-ground"};
  std::vector<std::pair<double, double>> robustness_grid{
      {0.0, 0.0}, {0.05, 0.05}, {0.05, 0.20}, {0.20, 0.05}, {0.20, 0.20}};

  std::vector<std::filesystem::path> sequences;
  std::filesystem::path label_map;   // empty: built-in SemanticKITTI table
  std::filesystem::path road_graph;  // empty: <sequence>/road_graph.txt
  std::filesystem::path output_dir = "out";
  std::string road_class = "road";
  std::string sentinel_class = "unlabeled";
  std::array<double, 12> calibration{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  std::optional<GeodeticPoint> projection_origin;

  bool debug_images = false;
  bool write_noisy_labels = false;
  int threads = 0;  // 0: hardware concurrency; never changes the output

  /// Detector parameters with delta_a taken from delta_a_deg.
  DetectorParams detector_params() const;
  EvalSettings eval_settings() const;
  NoiseSpec noise(const LabelMap& labels) const;
  Pose3 calibration_pose() const;
  LabelMap labels() const;

  /// Assigns one key. Throws ConfigError on an unknown key or bad value.
  void set(const std::string& key, const std::string& value);
  std::string to_text() const;
  static const std::vector<std::string>& keys();

  /// Throws ConfigError when any value is out of range.
  void validate() const;
};

/// Parses config text. "include <path>" lines pull in another file relative to
/// `base_dir`; later assignments override earlier ones.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".",
                            RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// JLOC_OUTPUT_DIR replaces output_dir when set.
void apply_env_overrides(RunConfig& cfg);

}  // namespace jloc
