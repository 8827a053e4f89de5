#include "jloc/detector.hpp"

#include <cmath>
#include <string>

#include "jloc/error.hpp"
#include "jloc/morphology.hpp"
#include "jloc/thinning.hpp"

namespace jloc {

int ceil_ratio(double num, double den) { return static_cast<int>(std::ceil(num / den - 1e-9)); }

int DetectorParams::close_radius() const { return close_radius_px.value_or(ceil_ratio(1.6, resolution)); }
int DetectorParams::open_radius() const { return open_radius_px.value_or(ceil_ratio(1.0, resolution)); }
double DetectorParams::nms_radius() const {
  return nms_radius_px.value_or(static_cast<double>(ceil_ratio(inner_radius, resolution)));
}

int DetectorParams::spur_length_px() const { return spur_length > 0.0 ? ceil_ratio(spur_length, resolution) : 0; }

HarrisParams DetectorParams::harris() const {
  return {harris_k, harris_sigma, harris_rel_threshold, nms_radius(), subpixel, harris_derivative_sigma};
}

void DetectorParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be strictly positive");
  };
  positive(delta_p, "delta_p");
  positive(delta_a, "delta_a");
  positive(roi_size, "roi_size");
  positive(resolution, "resolution");
  positive(min_points, "min_points");
  positive(inner_radius, "inner_radius");
  positive(outer_radius, "outer_radius");
  positive(close_radius(), "close_radius_px");
  positive(open_radius(), "open_radius_px");
  positive(harris_k, "harris_k");
  positive(harris_sigma, "harris_sigma");
  if (!(spur_length >= 0.0)) throw ConfigError("spur_length must be non-negative");
  if (!(harris_derivative_sigma >= 0.0)) throw ConfigError("harris_derivative_sigma must be non-negative");
  positive(harris_rel_threshold, "harris_rel_threshold");
  positive(nms_radius(), "nms_radius_px");
  if (n < 0) throw ConfigError("n must be non-negative");
  if (outer_radius <= inner_radius) throw ConfigError("outer_radius must exceed inner_radius");
  if (roi_size <= 2.0 * outer_radius) throw ConfigError("roi_size must exceed 2 * outer_radius (empty relevant zone)");
  if (roi_size / resolution > 20000) throw ConfigError("roi_size / resolution is unreasonably large");
  if (max_annulus_outside < 0.0 || max_annulus_outside > 1.0) throw ConfigError("max_annulus_outside must lie in [0, 1]");
}

PointCloud filter_road_points(const SemanticScan& scan, ClassId road_class) {
  if (scan.labels.size() != scan.cloud.size()) {
    throw InvariantError("filter_road_points: " + std::to_string(scan.labels.size()) + " labels for " +
                         std::to_string(scan.cloud.size()) + " points");
  }
  PointCloud out;
  out.frame = scan.cloud.frame;
  for (std::size_t i = 0; i < scan.labels.size(); ++i) {
    if (scan.labels[i] == road_class) out.points.push_back(scan.cloud.points[i]);
  }
  return out;
}

std::vector<std::size_t> select_keyframes(std::span<const Pose3> poses, const DetectorParams& params) {
  std::vector<std::size_t> keys;
  if (poses.empty()) return keys;
  keys.push_back(0);
  // The tolerance absorbs accumulated rounding in trajectories sampled at exact multiples.
  constexpr double eps = 1e-9;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    const PoseDelta d = pose_delta(poses[keys.back()], poses[i]);
    if (d.distance >= params.delta_p - eps || d.angle >= params.delta_a - eps) keys.push_back(i);
  }
  return keys;
}

Keyframe make_keyframe(int timestep, const Pose3& pose, const PointCloud& road_sensor) {
  Pose3 p = pose;
  p.source = Frame::Sensor;
  p.target = Frame::World;
  return {timestep, pose, std::make_shared<const PointCloud>(transform_points(p, road_sensor))};
}

KeyframeWindow build_window(std::span<const Keyframe> keyframes, std::size_t center, const DetectorParams& params) {
  if (center >= keyframes.size()) throw InvariantError("build_window: center index out of range");
  const std::size_t n = static_cast<std::size_t>(params.n);
  const std::size_t lo = center >= n ? center - n : 0;
  const std::size_t hi = params.causal ? center : std::min(keyframes.size() - 1, center + n);
  KeyframeWindow w;
  w.frames.assign(keyframes.begin() + lo, keyframes.begin() + hi + 1);
  w.center_index = center - lo;
  return w;
}

BinaryGrid rasterize_bev(const KeyframeWindow& window, const DetectorParams& params) {
  const Vec2 center = window.center().pose.translation.head<2>();
  BinaryGrid grid = BinaryGrid::roi(center, params.roi_size, params.resolution);
  std::vector<std::uint32_t> counts(grid.bits().size(), 0);
  const double inv_r = 1.0 / params.resolution;
  const Vec2 origin = grid.origin();
  const int w = grid.width(), h = grid.height();
  for (const auto& kf : window.frames) {
    if (!kf.road_world) continue;
    for (const auto& p : kf.road_world->points) {
      const double fc = std::floor((p.x() - origin.x()) * inv_r + 0.5);
      const double fr = std::floor((origin.y() - p.y()) * inv_r + 0.5);
      if (fc < 0 || fr < 0 || fc >= w || fr >= h) continue;
      ++counts[grid.index(static_cast<int>(fc), static_cast<int>(fr))];
    }
  }
  const auto m = static_cast<std::uint32_t>(params.min_points);
  for (std::size_t i = 0; i < counts.size(); ++i) grid.bits()[i] = counts[i] >= m ? 1 : 0;
  return grid;
}

BinaryGrid infer_occupancy(const BinaryGrid& bev, const DetectorParams& params) {
  return morph_open(morph_close(bev, params.close_radius()), params.open_radius());
}

BinaryGrid extract_centerline(const BinaryGrid& occupancy) { return zhang_suen_thin(occupancy); }

BinaryGrid extract_centerline(const BinaryGrid& occupancy, const DetectorParams& params) {
  return prune_spurs(zhang_suen_thin(occupancy), params.spur_length_px());
}

CandidateSet detect_corners(const BinaryGrid& centerline, const DetectorParams& params, int timestep) {
  CandidateSet out;
  out.timestep = timestep;
  for (const auto& c : harris_corners(centerline, params.harris())) {
    out.points.push_back(c.pixel);
    out.responses.push_back(c.response);
  }
  return out;
}

}  // namespace jloc
