#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "jloc/detector.hpp"
#include "jloc/geometry.hpp"
#include "jloc/grid.hpp"

namespace jloc {

/// Centerline pixels of one road branch inside the outer annulus, approximated
/// by the radial line through `start` (on the inner circle) and `center` (mean
/// of the pixels).
struct Branch {
  std::vector<PixelIndex> pixels;
  Vec2 start = Vec2::Zero();
  Vec2 center = Vec2::Zero();

  Vec2 direction() const { return (center - start).normalized(); }
};

struct RefinedIntersection {
  int timestep = 0;
  Vec2 pixel_pos = Vec2::Zero();  // ROI image (col, row)
  Vec2 lidar_pos = Vec2::Zero();  // planar LiDAR frame [m]
  int branch_count = 0;
  double residual = 0.0;  // sum of squared perpendicular distances [px^2]
  bool refined = true;    // false when the branch lines were all parallel
};

/// All branch lines are parallel, the least-squares point is not unique.
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replaces every group of candidates lying in one candidate's inner disk
/// (distance < radius_px) by its centroid, repeating until no two are that close.
CandidateSet merge_close_candidates(const CandidateSet& candidates, double radius_px);

/// Connected (8-neighbour) centerline components of the annulus
/// inner_px < |p - cand| < outer_px that start at the inner circle. Pixels within
/// another candidate's inner disk cut the branch there.
std::vector<Branch> segment_branches(const BinaryGrid& centerline, const Vec2& cand, std::span<const Vec2> others,
                                     double inner_px, double outer_px);

bool classify(std::span<const Branch> branches);

/// Sum of squared perpendicular distances from `p` to the branch lines.
double branch_residual(std::span<const Branch> branches, const Vec2& p);

struct RefinedPoint {
  Vec2 pixel = Vec2::Zero();
  double residual = 0.0;
};

/// Pixel of the open inner disk around `cand` minimising branch_residual().
/// Pixels within 1e-9 (relative) of the minimum tie; ties go to the pixel closest
/// to `cand`, then to the smaller (row, col).
/// Throws DegenerateGeometryError when every branch line is parallel.
RefinedPoint refine_position(std::span<const Branch> branches, const Vec2& cand, double inner_px);

/// Fraction of the annulus lattice that falls outside the grid.
double annulus_outside_fraction(const BinaryGrid& grid, const Vec2& cand, double inner_px, double outer_px);

/// ROI image position -> planar LiDAR frame. The image y axis points along
/// world -y; the LiDAR yaw comes from `lidar_pose` (T_WL).
Vec2 to_lidar_frame(const Vec2& pixel, const Pose3& lidar_pose, const BinaryGrid& roi);

/// Full second stage for one timestep: merge, branch segmentation,
/// classification, least-squares correction and conversion to the LiDAR frame.
std::vector<RefinedIntersection> refine_candidates(const BinaryGrid& centerline, const CandidateSet& candidates,
                                                   const Pose3& lidar_pose, const DetectorParams& params);

}  // namespace jloc
