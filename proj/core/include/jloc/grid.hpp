#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "jloc/geometry.hpp"

namespace jloc {

struct PixelIndex {
  int col = 0;
  int row = 0;
  bool operator==(const PixelIndex&) const = default;
};

/// Square BEV raster, axis-aligned with the world frame: column index grows
/// along world +x, row index along world -y. Pixel (col, row) covers the
/// half-open cell of side `resolution` centred on
///   origin + (col * r, -row * r).
class BinaryGrid {
 public:
  BinaryGrid() = default;
  BinaryGrid(int width, int height, double resolution = 1.0, Vec2 origin = Vec2::Zero());

  /// Grid of floor(S/r)+1 pixels per side whose centre pixel sits on `center`.
  static BinaryGrid roi(const Vec2& center, double roi_size, double resolution);
  static int roi_pixels(double roi_size, double resolution);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }
  /// Continuous pixel coordinates (col, row) of the ROI centre.
  Vec2 center_pixel() const { return {(width_ - 1) / 2.0, (height_ - 1) / 2.0}; }

  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  bool at(int col, int row) const { return bits_[index(col, row)] != 0; }
  /// Out-of-bounds reads return background.
  bool get(int col, int row) const { return in_bounds(col, row) && at(col, row); }
  void set(int col, int row, bool v = true) { bits_[index(col, row)] = v ? 1 : 0; }

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::vector<std::uint8_t>& bits() { return bits_; }
  std::size_t count() const;

  std::optional<PixelIndex> pixel_of(const Vec2& world_xy) const;
  Vec2 pixel_center(int col, int row) const;

  /// Same geometry, all pixels cleared.
  BinaryGrid blank_like() const { return BinaryGrid(width_, height_, resolution_, origin_); }

  bool operator==(const BinaryGrid& o) const {
    return width_ == o.width_ && height_ == o.height_ && bits_ == o.bits_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Vec2 origin_ = Vec2::Zero();
  std::vector<std::uint8_t> bits_;
};

/// 8-connected component labelling. Background gets 0, components 1..n in
/// raster order of their first pixel.
std::vector<int> label_components(const BinaryGrid& g, int* count = nullptr);
int count_components(const BinaryGrid& g);

/// Plain-text portable bitmap (P1).
void write_pbm(const std::filesystem::path& path, const BinaryGrid& g);

}  // namespace jloc
