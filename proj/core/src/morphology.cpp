#include "jloc/morphology.hpp"

#include <limits>

#include "jloc/error.hpp"

namespace jloc {
namespace {

constexpr double kFar = 1e20;

// 1-D squared distance transform of sampled function f (lower envelope of parabolas).
void dt1d(const double* f, int n, std::size_t stride_in, double* d, std::size_t stride_out,
          std::vector<int>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  const auto fv = [&](int i) { return f[i * stride_in] + double(i) * i; };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = (fv(q) - fv(v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = (fv(q) - fv(v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q * stride_out] = dq * dq + f[v[k] * stride_in];
  }
}

// Copies g into a zero border of `pad` pixels.
std::vector<std::uint8_t> padded(const BinaryGrid& g, int pad, int& w, int& h) {
  w = g.width() + 2 * pad;
  h = g.height() + 2 * pad;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h, 0);
  for (int row = 0; row < g.height(); ++row) {
    for (int col = 0; col < g.width(); ++col) {
      out[static_cast<std::size_t>(row + pad) * w + col + pad] = g.at(col, row) ? 1 : 0;
    }
  }
  return out;
}

std::vector<std::uint8_t> dilate_raw(const std::vector<std::uint8_t>& img, int w, int h, int radius) {
  const auto d2 = squared_distance_transform(img, w, h);
  const double r2 = double(radius) * radius;
  std::vector<std::uint8_t> out(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = d2[i] <= r2 ? 1 : 0;
  return out;
}

// Erosion treating everything beyond the buffer as background.
std::vector<std::uint8_t> erode_raw(const std::vector<std::uint8_t>& img, int w, int h, int radius) {
  // Distance to background, with an extra ring of background around the buffer.
  const int W = w + 2, H = h + 2;
  std::vector<std::uint8_t> bg(static_cast<std::size_t>(W) * H, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) bg[static_cast<std::size_t>(r + 1) * W + c + 1] = img[static_cast<std::size_t>(r) * w + c] ? 0 : 1;
  }
  const auto d2 = squared_distance_transform(bg, W, H);
  const double r2 = double(radius) * radius;
  std::vector<std::uint8_t> out(img.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out[static_cast<std::size_t>(r) * w + c] = d2[static_cast<std::size_t>(r + 1) * W + c + 1] > r2 ? 1 : 0;
  }
  return out;
}

BinaryGrid crop(const BinaryGrid& like, const std::vector<std::uint8_t>& img, int w, int pad) {
  BinaryGrid out = like.blank_like();
  for (int row = 0; row < out.height(); ++row) {
    for (int col = 0; col < out.width(); ++col) {
      out.set(col, row, img[static_cast<std::size_t>(row + pad) * w + col + pad] != 0);
    }
  }
  return out;
}

void check_radius(int radius) {
  if (radius < 0) throw InvariantError("structuring element radius must be non-negative");
}

}  // namespace

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& feature, int width, int height) {
  std::vector<double> f(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) f[i] = feature[i] ? 0.0 : kFar;
  if (width == 0 || height == 0) return f;
  std::vector<double> tmp(f.size());
  std::vector<int> v;
  std::vector<double> z;
  for (int c = 0; c < width; ++c) dt1d(f.data() + c, height, width, tmp.data() + c, width, v, z);
  for (int r = 0; r < height; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * width;
    dt1d(tmp.data() + off, width, 1, f.data() + off, 1, v, z);
  }
  return f;
}

BinaryGrid dilate(const BinaryGrid& g, int radius) {
  check_radius(radius);
  int w, h;
  auto img = padded(g, 0, w, h);
  return crop(g, dilate_raw(img, w, h, radius), w, 0);
}

BinaryGrid erode(const BinaryGrid& g, int radius) {
  check_radius(radius);
  int w, h;
  auto img = padded(g, 0, w, h);
  return crop(g, erode_raw(img, w, h, radius), w, 0);
}

BinaryGrid morph_close(const BinaryGrid& g, int radius) {
  check_radius(radius);
  const int pad = radius + 1;
  int w, h;
  auto img = padded(g, pad, w, h);
  return crop(g, erode_raw(dilate_raw(img, w, h, radius), w, h, radius), w, pad);
}

BinaryGrid morph_open(const BinaryGrid& g, int radius) {
  check_radius(radius);
  int w, h;
  auto img = padded(g, 0, w, h);
  return crop(g, dilate_raw(erode_raw(img, w, h, radius), w, h, radius), w, 0);
}

}  // namespace jloc
