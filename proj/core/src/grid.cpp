#include "jloc/grid.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "jloc/error.hpp"

namespace jloc {

BinaryGrid::BinaryGrid(int width, int height, double resolution, Vec2 origin)
    : width_(width), height_(height), resolution_(resolution), origin_(origin) {
  if (width < 0 || height < 0) throw InvariantError("grid dimensions must be non-negative");
  if (!(resolution > 0.0)) throw InvariantError("grid resolution must be positive");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

int BinaryGrid::roi_pixels(double roi_size, double resolution) {
  if (!(roi_size > 0.0) || !(resolution > 0.0)) throw InvariantError("ROI size and resolution must be positive");
  // S/r is usually meant to be integral (120 / 0.16); absorb the representation error.
  return static_cast<int>(std::floor(roi_size / resolution + 1e-9)) + 1;
}

BinaryGrid BinaryGrid::roi(const Vec2& center, double roi_size, double resolution) {
  const int n = roi_pixels(roi_size, resolution);
  const double half = (n - 1) / 2.0 * resolution;
  return BinaryGrid(n, n, resolution, Vec2(center.x() - half, center.y() + half));
}

std::size_t BinaryGrid::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](auto b) { return b != 0; }));
}

std::optional<PixelIndex> BinaryGrid::pixel_of(const Vec2& world_xy) const {
  const double fc = std::floor((world_xy.x() - origin_.x()) / resolution_ + 0.5);
  const double fr = std::floor((origin_.y() - world_xy.y()) / resolution_ + 0.5);
  if (fc < 0 || fr < 0 || fc >= width_ || fr >= height_) return std::nullopt;
  return PixelIndex{static_cast<int>(fc), static_cast<int>(fr)};
}

Vec2 BinaryGrid::pixel_center(int col, int row) const {
  return {origin_.x() + col * resolution_, origin_.y() - row * resolution_};
}

std::vector<int> label_components(const BinaryGrid& g, int* count) {
  std::vector<int> labels(g.bits().size(), 0);
  int next = 0;
  std::vector<PixelIndex> stack;
  for (int row = 0; row < g.height(); ++row) {
    for (int col = 0; col < g.width(); ++col) {
      if (!g.at(col, row) || labels[g.index(col, row)] != 0) continue;
      ++next;
      labels[g.index(col, row)] = next;
      stack.push_back({col, row});
      while (!stack.empty()) {
        const PixelIndex p = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int c = p.col + dc, r = p.row + dr;
            if (!g.get(c, r)) continue;
            int& l = labels[g.index(c, r)];
            if (l == 0) {
              l = next;
              stack.push_back({c, r});
            }
          }
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

int count_components(const BinaryGrid& g) {
  int n = 0;
  label_components(g, &n);
  return n;
}

void write_pbm(const std::filesystem::path& path, const BinaryGrid& g) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << "P1\n" << g.width() << ' ' << g.height() << '\n';
  for (int row = 0; row < g.height(); ++row) {
    for (int col = 0; col < g.width(); ++col) {
      out << (g.at(col, row) ? '1' : '0') << (col + 1 == g.width() ? '\n' : ' ');
    }
  }
}

}  // namespace jloc
