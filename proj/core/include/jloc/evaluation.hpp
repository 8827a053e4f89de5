#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jloc/geometry.hpp"
#include "jloc/road_graph.hpp"

namespace jloc {

struct GeoreferencedDetection {
  int timestep = 0;
  Vec2 position = Vec2::Zero();   // (G) [m]
  Vec2 lidar_pos = Vec2::Zero();  // (L_k) [m]
};

enum class Verdict { TruePositive, FalsePositive };

struct MatchRecord {
  GeoreferencedDetection detection;
  std::optional<IntersectionNode> matched_node;
  std::optional<double> center_error;  // [m]
  Verdict verdict = Verdict::FalsePositive;
};

GeoreferencedDetection georeference(int timestep, const Vec2& lidar_pos, const Pose2& gt_pose);

/// Nodes strictly inside the axis-aligned square of side `side` around `center`.
IntersectionNodeSet nodes_in_square(std::span<const IntersectionNode> nodes, const Vec2& center, double side);

/// Nearest node (lowest id on exact ties); TP iff matched with error < D.
MatchRecord match_detection(const GeoreferencedDetection& det, std::span<const IntersectionNode> candidates,
                            double threshold_d);

/// Zone nodes (square of side S - 2 a_o) that no detection of the timestep
/// matched with error < D.
int count_false_negatives(std::span<const IntersectionNode> roi_nodes, std::span<const MatchRecord> matches_at_k,
                          const Vec2& lidar_xy, double roi_size, double outer_radius, double threshold_d,
                          std::vector<NodeId>* missed = nullptr);

/// Mean center error over matched pairs; nullopt when nothing matched.
std::optional<double> compute_ace(std::span<const MatchRecord> matches, bool tp_only = false);

struct PrecisionRecall {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};
PrecisionRecall compute_pr_f1(long tp, long fp, long fn);

struct ThresholdMetrics {
  double threshold_d = 0.0;
  long tp = 0, fp = 0, fn = 0;
  PrecisionRecall pr;
};

struct SequenceReport {
  std::string name;
  std::optional<double> ace;
  long matched_pairs = 0;
  long detections = 0;
  long excluded_detections = 0;  // no ground-truth pose at their timestep
  long timesteps = 0;
  std::vector<ThresholdMetrics> metrics;
  std::vector<NodeId> unmatched_zone_nodes;  // missed at the reference threshold
};

struct EvalReport {
  std::optional<double> ace;
  bool ace_tp_only = false;
  double reference_d = 5.0;
  std::vector<ThresholdMetrics> metrics;
  std::vector<SequenceReport> sequences;

  const ThresholdMetrics* at(double d) const;
};

/// Detections of one sequence in the LiDAR frame, keyed by timestep.
struct SequenceDetections {
  std::string name;
  std::vector<int> timesteps;  // every processed timestep, with or without detections
  std::multimap<int, Vec2> lidar_positions;
};

struct EvalSettings {
  std::vector<double> thresholds;  // D values
  double reference_d = 5.0;
  double roi_size = 120.0;
  double outer_radius = 40.0;
  bool ace_tp_only = false;
};

std::vector<double> default_thresholds();

SequenceReport evaluate_sequence(const SequenceDetections& dets, const std::map<int, Pose2>& gt_poses,
                                 std::span<const IntersectionNode> nodes, const EvalSettings& settings,
                                 std::vector<MatchRecord>* matches_out = nullptr);

/// Sums per-sequence counts; ACE is recomputed over all pairs of all sequences.
EvalReport aggregate(std::vector<SequenceReport> sequences, std::span<const MatchRecord> all_matches,
                     const EvalSettings& settings);

}  // namespace jloc
