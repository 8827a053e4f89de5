#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "jloc/geometry.hpp"
#include "jloc/grid.hpp"
#include "jloc/harris.hpp"
#include "jloc/scan_io.hpp"

namespace jloc {

/// Detector and refinement parameters. Defaults are the published settings;
/// structuring-element radii, Harris constants and the NMS radius are derived
/// from the resolution unless set explicitly.
struct DetectorParams {
  double delta_p = 2.0;            // keyframe distance threshold [m]
  double delta_a = deg2rad(5.0);   // keyframe angle threshold [rad]
  int n = 20;                      // keyframes on each side of the current one
  double roi_size = 120.0;         // S [m]
  double resolution = 0.16;        // r [m/px]
  int min_points = 5;              // m
  double inner_radius = 10.0;      // a_i [m]
  double outer_radius = 40.0;      // a_o [m]

  std::optional<int> close_radius_px;  // default ceil(1.6 m / r)
  std::optional<int> open_radius_px;   // default ceil(1.0 m / r)
  double spur_length = 6.0;            // skeleton spurs shorter than this are pruned [m], 0 keeps them
  double harris_k = 0.04;
  double harris_sigma = 2.0;
  double harris_derivative_sigma = 1.0;
  double harris_rel_threshold = 0.2;
  std::optional<double> nms_radius_px;  // default ceil(a_i / r)
  bool subpixel = true;
  bool causal = false;  // window uses only past keyframes
  double max_annulus_outside = 0.5;

  int close_radius() const;
  int open_radius() const;
  double nms_radius() const;
  int spur_length_px() const;
  double inner_radius_px() const { return inner_radius / resolution; }
  double outer_radius_px() const { return outer_radius / resolution; }
  HarrisParams harris() const;

  /// Throws ConfigError when a value is out of range.
  void validate() const;
};

/// ceil() that ignores representation noise in ratios such as 1.6 / 0.16.
int ceil_ratio(double num, double den);

struct Keyframe {
  int timestep = 0;
  Pose3 pose;  // T_WL
  std::shared_ptr<const PointCloud> road_world;
};

struct KeyframeWindow {
  std::vector<Keyframe> frames;
  std::size_t center_index = 0;

  const Keyframe& center() const { return frames.at(center_index); }
};

struct CandidateSet {
  int timestep = 0;
  std::vector<Vec2> points;  // (col, row) in the ROI image
  std::vector<double> responses;
};

PointCloud filter_road_points(const SemanticScan& scan, ClassId road_class);

/// Indices of keyframes: the first pose, then every pose whose translation or
/// rotation since the previous keyframe reaches the thresholds.
std::vector<std::size_t> select_keyframes(std::span<const Pose3> poses, const DetectorParams& params);

/// Builds a keyframe from a sensor-frame road cloud.
Keyframe make_keyframe(int timestep, const Pose3& pose, const PointCloud& road_sensor);

/// Keyframes center-n .. center+n (clipped at the sequence ends; no future
/// keyframes in causal mode).
KeyframeWindow build_window(std::span<const Keyframe> keyframes, std::size_t center, const DetectorParams& params);

/// ROI centred on the current keyframe; a pixel is set when at least
/// `min_points` projected points fall into its cell.
BinaryGrid rasterize_bev(const KeyframeWindow& window, const DetectorParams& params);

/// Closing then opening with disk elements.
BinaryGrid infer_occupancy(const BinaryGrid& bev, const DetectorParams& params);

/// Zhang-Suen skeleton of the occupancy grid.
BinaryGrid extract_centerline(const BinaryGrid& occupancy);
/// Skeleton with spurs shorter than `spur_length` removed.
BinaryGrid extract_centerline(const BinaryGrid& occupancy, const DetectorParams& params);

CandidateSet detect_corners(const BinaryGrid& centerline, const DetectorParams& params, int timestep = 0);

}  // namespace jloc
