#include "jloc/thinning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace jloc {
namespace {

struct Neighbourhood {
  // P2..P9: N, NE, E, SE, S, SW, W, NW
  std::array<std::uint8_t, 8> p;

  int count() const {
    int b = 0;
    for (auto v : p) b += v;
    return b;
  }
  int transitions() const {
    int a = 0;
    for (int i = 0; i < 8; ++i) a += (p[i] == 0 && p[(i + 1) % 8] == 1);
    return a;
  }
};

}  // namespace

BinaryGrid zhang_suen_thin(const BinaryGrid& g) {
  // One-pixel background frame so neighbour reads never leave the buffer.
  const int w = g.width() + 2;
  const int h = g.height() + 2;
  std::vector<std::uint8_t> img(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> fg;
  for (int row = 0; row < g.height(); ++row) {
    for (int col = 0; col < g.width(); ++col) {
      if (!g.at(col, row)) continue;
      const int i = (row + 1) * w + col + 1;
      img[i] = 1;
      fg.push_back(i);
    }
  }

  const std::array<int, 8> offset = {-w, -w + 1, 1, w + 1, w, w - 1, -1, -w - 1};
  const auto neighbourhood = [&](int i) {
    Neighbourhood n;
    for (int k = 0; k < 8; ++k) n.p[k] = img[i + offset[k]];
    return n;
  };
  const auto simple = [](const Neighbourhood& n) {
    const int b = n.count();
    return b >= 2 && b <= 6 && n.transitions() == 1;
  };

  std::vector<int> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int sub = 0; sub < 2; ++sub) {
      marked.clear();
      for (int i : fg) {
        const Neighbourhood n = neighbourhood(i);
        if (!simple(n)) continue;
        const auto& p = n.p;  // p[0]=P2 p[2]=P4 p[4]=P6 p[6]=P8
        const bool ok = sub == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                 : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
        if (ok) marked.push_back(i);
      }
      for (int i : marked) {
        if (simple(neighbourhood(i))) {
          img[i] = 0;
          changed = true;
        }
      }
      std::erase_if(fg, [&](int i) { return img[i] == 0; });
    }
  }

  BinaryGrid out = g.blank_like();
  for (int i : fg) out.set(i % w - 1, i / w - 1);
  return out;
}

namespace {

bool prune_pass(const BinaryGrid& skeleton, BinaryGrid& out, int max_length) {
  const int w = skeleton.width(), h = skeleton.height();
  static constexpr std::array<int, 8> dc = {0, 1, 1, 1, 0, -1, -1, -1};
  static constexpr std::array<int, 8> dr = {-1, -1, 0, 1, 1, 1, 0, -1};
  const auto around = [&](int c, int r) {
    Neighbourhood n;
    for (int k = 0; k < 8; ++k) n.p[k] = skeleton.get(c + dc[k], r + dr[k]) ? 1 : 0;
    return n;
  };

  // Branch pixels cross three or more runs of foreground; staircase corners
  // of a diagonal line have three neighbours but only two runs.
  std::vector<std::uint8_t> zone(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::uint8_t> is_end(zone.size(), 0);
  std::vector<PixelIndex> branch;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!skeleton.at(c, r)) continue;
      const Neighbourhood n = around(c, r);
      if (n.transitions() >= 3) branch.push_back({c, r});
      if (n.count() >= 1 && n.transitions() == 1) is_end[skeleton.index(c, r)] = 1;
    }
  }
  if (branch.empty()) return false;
  // Junction zones: branch pixels grown by their skeleton neighbours, otherwise
  // the arcs leaving a branch pixel still touch diagonally.
  for (const auto& b : branch) {
    zone[skeleton.index(b.col, b.row)] = 1;
    for (int k = 0; k < 8; ++k) {
      if (skeleton.get(b.col + dc[k], b.row + dr[k])) zone[skeleton.index(b.col + dc[k], b.row + dr[k])] = 1;
    }
  }

  // Label junction clusters and arcs (components of the rest) in one array:
  // clusters get negative ids, arcs positive ones.
  std::vector<int> label(zone.size(), 0);
  std::vector<std::vector<PixelIndex>> cluster_pixels, arc_pixels;
  std::vector<PixelIndex> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = skeleton.index(c, r);
      if (!skeleton.at(c, r) || label[i] != 0) continue;
      const bool in_zone = zone[i] != 0;
      auto& groups = in_zone ? cluster_pixels : arc_pixels;
      groups.emplace_back();
      const int id = in_zone ? -static_cast<int>(groups.size()) : static_cast<int>(groups.size());
      label[i] = id;
      stack.assign(1, {c, r});
      while (!stack.empty()) {
        const PixelIndex p = stack.back();
        stack.pop_back();
        groups.back().push_back(p);
        for (int k = 0; k < 8; ++k) {
          const int nc = p.col + dc[k], nr = p.row + dr[k];
          if (!skeleton.get(nc, nr)) continue;
          const std::size_t j = skeleton.index(nc, nr);
          if (label[j] != 0 || (zone[j] != 0) != in_zone) continue;
          label[j] = id;
          stack.push_back({nc, nr});
        }
      }
    }
  }

  struct Arc {
    std::vector<int> clusters;  // touched cluster indices, ascending, unique
    bool has_end = false;
  };
  std::vector<Arc> arcs(arc_pixels.size());
  std::vector<int> degree(cluster_pixels.size(), 0);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    for (const auto& p : arc_pixels[a]) {
      arcs[a].has_end = arcs[a].has_end || is_end[skeleton.index(p.col, p.row)];
      for (int k = 0; k < 8; ++k) {
        const int nc = p.col + dc[k], nr = p.row + dr[k];
        if (!skeleton.get(nc, nr)) continue;
        const int l = label[skeleton.index(nc, nr)];
        if (l < 0) arcs[a].clusters.push_back(-l - 1);
      }
    }
    auto& cl = arcs[a].clusters;
    std::sort(cl.begin(), cl.end());
    cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
    for (int c : cl) ++degree[c];
  }

  bool removed = false;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& cl = arcs[a].clusters;
    // A spur hangs off one junction and ends freely: in an end pixel, or in a
    // junction cluster (a forked tip) that nothing else touches.
    int attach = -1, tip = -1;
    if (arcs[a].has_end && cl.size() == 1) {
      attach = cl[0];
    } else if (!arcs[a].has_end && cl.size() == 2 && (degree[cl[0]] == 1) != (degree[cl[1]] == 1)) {
      tip = degree[cl[0]] == 1 ? cl[0] : cl[1];
      attach = tip == cl[0] ? cl[1] : cl[0];
    }
    if (attach < 0) continue;
    // Reach rather than pixel count: a 4-connected staircase has twice as
    // many pixels as its length.
    std::optional<PixelIndex> base;
    for (const auto& p : arc_pixels[a]) {
      for (int k = 0; k < 8 && !base; ++k) {
        const int nc = p.col + dc[k], nr = p.row + dr[k];
        if (skeleton.get(nc, nr) && label[skeleton.index(nc, nr)] == -attach - 1) base = p;
      }
      if (base) break;
    }
    const auto reach_of = [&](const std::vector<PixelIndex>& px) {
      double d = 0.0;
      for (const auto& p : px) d = std::max(d, std::hypot(p.col - base->col, p.row - base->row));
      return d;
    };
    double reach = reach_of(arc_pixels[a]);
    if (tip >= 0) reach = std::max(reach, reach_of(cluster_pixels[tip]));
    if (reach >= max_length) continue;
    for (const auto& p : arc_pixels[a]) out.set(p.col, p.row, false);
    if (tip >= 0) {
      for (const auto& p : cluster_pixels[tip]) out.set(p.col, p.row, false);
    }
    removed = true;
  }
  return removed;
}

}  // namespace

BinaryGrid prune_spurs(const BinaryGrid& skeleton, int max_length) {
  BinaryGrid out = skeleton;
  if (max_length <= 0) return out;
  BinaryGrid current = skeleton;
  while (prune_pass(current, out, max_length)) current = out;
  return out;
}

}  // namespace jloc
