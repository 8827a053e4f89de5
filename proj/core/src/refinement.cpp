#include "jloc/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace jloc {
namespace {

struct Line {
  Vec2 normal;
  double offset;
};

std::vector<Line> branch_lines(std::span<const Branch> branches) {
  std::vector<Line> lines;
  lines.reserve(branches.size());
  for (const auto& b : branches) {
    const Vec2 d = b.direction();
    const Vec2 n(-d.y(), d.x());
    lines.push_back({n, n.dot(b.start)});
  }
  return lines;
}

double residual_of(const std::vector<Line>& lines, const Vec2& p) {
  double f = 0.0;
  for (const auto& l : lines) {
    const double d = l.normal.dot(p) - l.offset;
    f += d * d;
  }
  return f;
}

bool within_disk(const Vec2& p, const Vec2& center, double radius) { return (p - center).norm() < radius; }

}  // namespace

CandidateSet merge_close_candidates(const CandidateSet& candidates, double radius_px) {
  CandidateSet out = candidates;
  if (out.responses.size() != out.points.size()) out.responses.assign(out.points.size(), 0.0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < out.points.size() && !changed; ++i) {
      std::vector<std::size_t> group;
      for (std::size_t j = 0; j < out.points.size(); ++j) {
        if ((out.points[j] - out.points[i]).norm() < radius_px) group.push_back(j);
      }
      if (group.size() < 2) continue;
      Vec2 sum = Vec2::Zero();
      double response = -std::numeric_limits<double>::infinity();
      for (auto j : group) {
        sum += out.points[j];
        response = std::max(response, out.responses[j]);
      }
      const Vec2 merged = sum / static_cast<double>(group.size());
      // group is ascending and contains i; erase back to front, then put the merge at i.
      for (auto it = group.rbegin(); it != group.rend(); ++it) {
        if (*it == i) continue;
        out.points.erase(out.points.begin() + static_cast<std::ptrdiff_t>(*it));
        out.responses.erase(out.responses.begin() + static_cast<std::ptrdiff_t>(*it));
      }
      const std::size_t slot = i - static_cast<std::size_t>(std::count_if(group.begin(), group.end(),
                                                                          [&](std::size_t j) { return j < i; }));
      out.points[slot] = merged;
      out.responses[slot] = response;
      changed = true;
    }
  }
  return out;
}

std::vector<Branch> segment_branches(const BinaryGrid& centerline, const Vec2& cand, std::span<const Vec2> others,
                                     double inner_px, double outer_px) {
  const int c0 = std::max(0, static_cast<int>(std::floor(cand.x() - outer_px)));
  const int c1 = std::min(centerline.width() - 1, static_cast<int>(std::ceil(cand.x() + outer_px)));
  const int r0 = std::max(0, static_cast<int>(std::floor(cand.y() - outer_px)));
  const int r1 = std::min(centerline.height() - 1, static_cast<int>(std::ceil(cand.y() + outer_px)));
  if (c1 < c0 || r1 < r0) return {};
  const int bw = c1 - c0 + 1, bh = r1 - r0 + 1;

  // 0: outside, 1: annulus pixel not yet visited, 2: visited
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(bw) * bh, 0);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!centerline.at(c, r)) continue;
      const Vec2 p(c, r);
      const double d = (p - cand).norm();
      if (!(d > inner_px && d < outer_px)) continue;
      const bool cut = std::any_of(others.begin(), others.end(),
                                   [&](const Vec2& o) { return within_disk(p, o, inner_px); });
      if (!cut) mask[static_cast<std::size_t>(r - r0) * bw + (c - c0)] = 1;
    }
  }

  std::vector<Branch> branches;
  std::vector<PixelIndex> stack;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      auto& seed = mask[static_cast<std::size_t>(r - r0) * bw + (c - c0)];
      if (seed != 1) continue;
      seed = 2;
      Branch b;
      stack.push_back({c, r});
      while (!stack.empty()) {
        const PixelIndex p = stack.back();
        stack.pop_back();
        b.pixels.push_back(p);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nc = p.col + dc, nr = p.row + dr;
            if (nc < c0 || nc > c1 || nr < r0 || nr > r1) continue;
            auto& m = mask[static_cast<std::size_t>(nr - r0) * bw + (nc - c0)];
            if (m == 1) {
              m = 2;
              stack.push_back({nc, nr});
            }
          }
        }
      }
      std::sort(b.pixels.begin(), b.pixels.end(), [](const PixelIndex& a, const PixelIndex& q) {
        return a.row != q.row ? a.row < q.row : a.col < q.col;
      });
      // Start: pixel closest to the candidate; row-major order breaks ties.
      double best = std::numeric_limits<double>::infinity();
      Vec2 sum = Vec2::Zero();
      for (const auto& p : b.pixels) {
        const Vec2 v(p.col, p.row);
        sum += v;
        const double d = (v - cand).norm();
        if (d < best) {
          best = d;
          b.start = v;
        }
      }
      if (best >= inner_px + 1.5) continue;  // does not start at the inner circle
      b.center = sum / static_cast<double>(b.pixels.size());
      if ((b.center - b.start).norm() < 1e-9) continue;  // no line through a single point
      branches.push_back(std::move(b));
    }
  }
  return branches;
}

bool classify(std::span<const Branch> branches) { return branches.size() >= 3; }

double branch_residual(std::span<const Branch> branches, const Vec2& p) {
  return residual_of(branch_lines(branches), p);
}

RefinedPoint refine_position(std::span<const Branch> branches, const Vec2& cand, double inner_px) {
  if (branches.empty()) throw DegenerateGeometryError("refine_position: no branches");
  const auto lines = branch_lines(branches);

  bool all_parallel = true;
  for (std::size_t i = 1; i < lines.size() && all_parallel; ++i) {
    const double s = std::abs(lines[0].normal.x() * lines[i].normal.y() - lines[0].normal.y() * lines[i].normal.x());
    if (std::asin(std::min(1.0, s)) > 1e-6) all_parallel = false;
  }
  if (all_parallel) throw DegenerateGeometryError("refine_position: all branch lines are parallel");

  // Normal equations: f(p) = f* + (p - q)^T A (p - q).
  Mat2 A = Mat2::Zero();
  Vec2 rhs = Vec2::Zero();
  for (const auto& l : lines) {
    A += l.normal * l.normal.transpose();
    rhs += l.normal * l.offset;
  }
  const Mat2 A_inv = A.inverse();
  const Vec2 q = A_inv * rhs;
  const double f_star = residual_of(lines, q);

  // Search box: the ellipse {f <= f(reference pixel)} when the continuous
  // optimum's nearest pixel is in the disk, otherwise the whole disk.
  int c_lo = static_cast<int>(std::floor(cand.x() - inner_px)), c_hi = static_cast<int>(std::ceil(cand.x() + inner_px));
  int r_lo = static_cast<int>(std::floor(cand.y() - inner_px)), r_hi = static_cast<int>(std::ceil(cand.y() + inner_px));
  const Vec2 q_round(std::round(q.x()), std::round(q.y()));
  if (within_disk(q_round, cand, inner_px)) {
    const double f_ref = residual_of(lines, q_round);
    const double c = (f_ref - f_star) * (1.0 + 1e-6) + 1e-6 * (1.0 + std::abs(f_ref));
    const double hx = std::sqrt(std::max(0.0, c * A_inv(0, 0))) + 1.0;
    const double hy = std::sqrt(std::max(0.0, c * A_inv(1, 1))) + 1.0;
    c_lo = std::max(c_lo, static_cast<int>(std::floor(q.x() - hx)));
    c_hi = std::min(c_hi, static_cast<int>(std::ceil(q.x() + hx)));
    r_lo = std::max(r_lo, static_cast<int>(std::floor(q.y() - hy)));
    r_hi = std::min(r_hi, static_cast<int>(std::ceil(q.y() + hy)));
  }

  // Two passes keep the tie-break independent of scan order: the exact minimum
  // first, then the closest pixel among those within tolerance of it.
  std::vector<std::pair<Vec2, double>> scored;
  double f_min = std::numeric_limits<double>::infinity();
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const Vec2 p(c, r);
      if (!within_disk(p, cand, inner_px)) continue;
      const double f = residual_of(lines, p);
      scored.emplace_back(p, f);
      f_min = std::min(f_min, f);
    }
  }
  if (scored.empty()) throw DegenerateGeometryError("refine_position: inner disk contains no pixel");
  const double tol = 1e-9 * std::max(1.0, std::abs(f_min));
  const std::pair<Vec2, double>* best = nullptr;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& s : scored) {
    if (s.second > f_min + tol) continue;
    const double d2 = (s.first - cand).squaredNorm();
    // scored is in (row, col) order, so strict < keeps the smaller (row, col) on equal distance
    if (d2 < best_d2) {
      best_d2 = d2;
      best = &s;
    }
  }
  return {best->first, best->second};
}

double annulus_outside_fraction(const BinaryGrid& grid, const Vec2& cand, double inner_px, double outer_px) {
  const int c0 = static_cast<int>(std::floor(cand.x() - outer_px)), c1 = static_cast<int>(std::ceil(cand.x() + outer_px));
  const int r0 = static_cast<int>(std::floor(cand.y() - outer_px)), r1 = static_cast<int>(std::ceil(cand.y() + outer_px));
  std::size_t total = 0, outside = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double d = (Vec2(c, r) - cand).norm();
      if (!(d > inner_px && d < outer_px)) continue;
      ++total;
      if (!grid.in_bounds(c, r)) ++outside;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(outside) / static_cast<double>(total);
}

Vec2 to_lidar_frame(const Vec2& pixel, const Pose3& lidar_pose, const BinaryGrid& roi) {
  const Vec2 image_offset = (pixel - roi.center_pixel()) * roi.resolution();
  const Vec2 world_offset(image_offset.x(), -image_offset.y());  // pi about x flips y
  const Pose2 planar = project_to_pose2(lidar_pose);
  return planar.rotation().transpose() * world_offset;
}

std::vector<RefinedIntersection> refine_candidates(const BinaryGrid& centerline, const CandidateSet& candidates,
                                                   const Pose3& lidar_pose, const DetectorParams& params) {
  const double inner = params.inner_radius_px();
  const double outer = params.outer_radius_px();
  const CandidateSet merged = merge_close_candidates(candidates, inner);

  std::vector<Vec2> kept;
  for (const auto& p : merged.points) {
    if (annulus_outside_fraction(centerline, p, inner, outer) <= params.max_annulus_outside) kept.push_back(p);
  }

  std::vector<RefinedIntersection> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    std::vector<Vec2> others;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (j != i) others.push_back(kept[j]);
    }
    const auto branches = segment_branches(centerline, kept[i], others, inner, outer);
    if (!classify(branches)) continue;
    RefinedIntersection det;
    det.timestep = candidates.timestep;
    det.branch_count = static_cast<int>(branches.size());
    try {
      const RefinedPoint rp = refine_position(branches, kept[i], inner);
      det.pixel_pos = rp.pixel;
      det.residual = rp.residual;
    } catch (const DegenerateGeometryError&) {
      det.pixel_pos = kept[i];
      det.residual = branch_residual(branches, kept[i]);
      det.refined = false;
    }
    det.lidar_pos = to_lidar_frame(det.pixel_pos, lidar_pose, centerline);
    out.push_back(det);
  }
  return out;
}

}  // namespace jloc
