#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "jloc/grid.hpp"
#include "jloc/refinement.hpp"

namespace jloc::test {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("jloc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void fill_rect(BinaryGrid& g, int c0, int r0, int c1, int r1) {
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c)
      if (g.in_bounds(c, r)) g.set(c, r);
}

inline void fill_disk(BinaryGrid& g, double cc, double cr, double radius) {
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      if ((c - cc) * (c - cc) + (r - cr) * (r - cr) <= radius * radius) g.set(c, r);
}

/// One-pixel digital line between two points (DDA).
inline void draw_line(BinaryGrid& g, Vec2 a, Vec2 b) {
  const int steps = static_cast<int>(std::ceil((b - a).cwiseAbs().maxCoeff())) + 1;
  for (int i = 0; i <= steps; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / steps);
    const int c = static_cast<int>(std::lround(p.x())), r = static_cast<int>(std::lround(p.y()));
    if (g.in_bounds(c, r)) g.set(c, r);
  }
}

/// Plus sign of two bars of the given thickness crossing at (cc, cr).
inline void draw_plus(BinaryGrid& g, int cc, int cr, int half_len, int thickness) {
  const int h0 = -(thickness / 2), h1 = h0 + thickness - 1;
  fill_rect(g, cc - half_len, cr + h0, cc + half_len, cr + h1);
  fill_rect(g, cc + h0, cr - half_len, cc + h1, cr + half_len);
}

inline int neighbours8(const BinaryGrid& g, int c, int r) {
  int n = 0;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      if ((dr || dc) && g.get(c + dc, r + dr)) ++n;
  return n;
}

// ---- brute-force oracles -------------------------------------------------

/// Dilation by scanning every disk offset.
inline BinaryGrid naive_dilate(const BinaryGrid& g, int radius) {
  BinaryGrid out = g.blank_like();
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) {
      bool hit = false;
      for (int dr = -radius; dr <= radius && !hit; ++dr)
        for (int dc = -radius; dc <= radius && !hit; ++dc)
          if (dr * dr + dc * dc <= radius * radius && g.get(c + dc, r + dr)) hit = true;
      if (hit) out.set(c, r);
    }
  return out;
}

inline BinaryGrid naive_erode(const BinaryGrid& g, int radius) {
  BinaryGrid out = g.blank_like();
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) {
      bool all = true;
      for (int dr = -radius; dr <= radius && all; ++dr)
        for (int dc = -radius; dc <= radius && all; ++dc)
          if (dr * dr + dc * dc <= radius * radius && !g.get(c + dc, r + dr)) all = false;
      if (all) out.set(c, r);
    }
  return out;
}

/// Argmin of the branch residual over every pixel of the open inner disk,
/// with the documented tie-break, by exhaustive search.
inline RefinedPoint brute_force_refine(const std::vector<Branch>& branches, const Vec2& cand, double inner_px) {
  struct Px {
    Vec2 p;
    double f;
  };
  std::vector<Px> all;
  const int r0 = static_cast<int>(std::floor(cand.y() - inner_px)) - 1, r1 = static_cast<int>(std::ceil(cand.y() + inner_px)) + 1;
  const int c0 = static_cast<int>(std::floor(cand.x() - inner_px)) - 1, c1 = static_cast<int>(std::ceil(cand.x() + inner_px)) + 1;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const Vec2 p(c, r);
      if ((p - cand).norm() < inner_px) all.push_back({p, branch_residual(branches, p)});
    }
  double f_min = std::numeric_limits<double>::infinity();
  for (const auto& x : all) f_min = std::min(f_min, x.f);
  const double tol = 1e-9 * std::max(1.0, std::abs(f_min));
  const Px* best = nullptr;
  for (const auto& x : all) {
    if (x.f > f_min + tol) continue;
    if (!best) {
      best = &x;
      continue;
    }
    const double d = (x.p - cand).squaredNorm(), bd = (best->p - cand).squaredNorm();
    if (d < bd || (d == bd && (x.p.y() < best->p.y() || (x.p.y() == best->p.y() && x.p.x() < best->p.x())))) best = &x;
  }
  return {best->p, best->f};
}

}  // namespace jloc::test
