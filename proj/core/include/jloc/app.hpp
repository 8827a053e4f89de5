#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jloc/config.hpp"
#include "jloc/noise.hpp"
#include "jloc/pipeline.hpp"
#include "jloc/report.hpp"

namespace jloc {

/// Detects intersections in every configured sequence and writes
/// <output_dir>/<sequence>/{detections.txt, detections.json, keyframes.txt}
/// plus config.txt and manifest.json.
std::vector<DetectionRun> cmd_detect(const RunConfig& cfg);

/// Evaluates <detections_dir>/<sequence>/detections.json against each
/// sequence's ground truth; writes report.json, report.txt and manifest.json.
EvalReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& detections_dir);

/// Detect + evaluate once per robustness_grid cell with seeded label noise.
/// Writes robustness.json, robustness.txt and per-cell results.
std::vector<RobustnessRow> cmd_robustness(const RunConfig& cfg);

struct SynthOptions {
  std::string preset = "cross";  // cross | tee | straight | curve
  std::filesystem::path output;
  std::uint64_t seed = 1;
  double density = 30.0;
  double length = 180.0;   // driven distance [m]
  double radius = 100.0;   // curve preset
  double odometry_yaw_deg = 0.0;
  bool drop_sectors = false;
};
SceneSpec preset_scene(const SynthOptions& opt);
void cmd_synth(const SynthOptions& opt);

struct NoiseMeasurement {
  NoiseMeter meter;
  long scans = 0;
};
/// Per-point FPR/FNR of predicted label files against the ground-truth labels
/// of `truth_dir`, pooled over the whole sequence. Writes noise.json.
NoiseMeasurement cmd_measure_noise(const RunConfig& cfg, const std::filesystem::path& truth_dir,
                                   const std::filesystem::path& predicted_dir);

/// Writes bev/occ/cen portable bitmaps for every keyframe under
/// <output_dir>/<sequence>/debug.
void cmd_debug_images(const RunConfig& cfg);

/// Evaluation of in-memory detection runs for the configured sequences.
EvalReport evaluate_runs(const RunConfig& cfg, const std::vector<DetectionRun>& runs);

}  // namespace jloc
