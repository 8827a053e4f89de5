#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jloc/label_map.hpp"

namespace jloc {

/// Segmentation-error model: a fraction `fnr` of road points loses its road
/// label, and a fraction `fpr` of each confusion class is relabelled road.
struct NoiseSpec {
  double fpr = 0.0;
  double fnr = 0.0;
  std::vector<ClassId> confusion_classes;
  std::uint64_t seed = 0;

  bool is_identity() const { return fpr == 0.0 && fnr == 0.0; }
  /// Throws ConfigError on rates outside [0, 1] or classes missing from `labels`.
  void validate(const LabelMap& labels) const;
};

/// Confusion classes "sidewalk", "parking", "other-ground" from the label map.
std::vector<ClassId> default_confusion_classes(const LabelMap& labels);

/// Per-scan stream seed derived from (seed, timestep) with splitmix64.
std::uint64_t scan_seed(std::uint64_t seed, int timestep);

/// Returns corrupted labels. Exactly round(fnr * N_road) road labels become
/// `sentinel` and round(fpr * N_c) labels of each confusion class c become
/// `road`; nothing else changes. Deterministic in (labels, spec, timestep).
std::vector<ClassId> corrupt_labels(std::span<const ClassId> labels, const NoiseSpec& spec, int timestep,
                                    ClassId road, ClassId sentinel);

/// Per-point error rates of predicted labels against ground truth, accumulated
/// over any number of scans.
struct NoiseMeter {
  std::uint64_t road_total = 0;
  std::uint64_t road_missed = 0;
  std::uint64_t confusion_total = 0;
  std::uint64_t confusion_as_road = 0;

  void add(std::span<const ClassId> truth, std::span<const ClassId> predicted, ClassId road,
           std::span<const ClassId> confusion_classes);
  double fpr() const { return confusion_total ? double(confusion_as_road) / double(confusion_total) : 0.0; }
  double fnr() const { return road_total ? double(road_missed) / double(road_total) : 0.0; }
};

}  // namespace jloc
