#include "jloc/harris.hpp"

#include <algorithm>
#include <cmath>

namespace jloc {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable convolution with zero padding.
void blur(std::vector<double>& img, int w, int h, const std::vector<double>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(img.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    const double* src = img.data() + static_cast<std::size_t>(y) * w;
    double* dst = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      if (src[x] == 0.0) continue;
      const int lo = std::max(-r, -x), hi = std::min(r, w - 1 - x);
      for (int i = lo; i <= hi; ++i) dst[x + i] += src[x] * kernel[i + r];
    }
  }
  std::fill(img.begin(), img.end(), 0.0);
  for (int y = 0; y < h; ++y) {
    const double* src = tmp.data() + static_cast<std::size_t>(y) * w;
    bool any = false;
    for (int x = 0; x < w && !any; ++x) any = src[x] != 0.0;
    if (!any) continue;
    const int lo = std::max(-r, -y), hi = std::min(r, h - 1 - y);
    for (int i = lo; i <= hi; ++i) {
      double* dst = img.data() + static_cast<std::size_t>(y + i) * w;
      const double wk = kernel[i + r];
      for (int x = 0; x < w; ++x) dst[x] += src[x] * wk;
    }
  }
}

}  // namespace

std::vector<double> harris_response(const BinaryGrid& g, double k, double sigma, double derivative_sigma) {
  const int w = g.width(), h = g.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> img(n);
  for (std::size_t i = 0; i < n; ++i) img[i] = g.bits()[i] ? 1.0 : 0.0;
  if (derivative_sigma > 0.0) blur(img, w, h, gaussian_kernel(derivative_sigma));
  const auto val = [&](int c, int r) {
    return (c < 0 || r < 0 || c >= w || r >= h) ? 0.0 : img[static_cast<std::size_t>(r) * w + c];
  };
  std::vector<double> xx(n, 0.0), yy(n, 0.0), xy(n, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double ix = 0.5 * (val(c + 1, r) - val(c - 1, r));
      const double iy = 0.5 * (val(c, r + 1) - val(c, r - 1));
      if (ix == 0.0 && iy == 0.0) continue;
      const std::size_t i = g.index(c, r);
      xx[i] = ix * ix;
      yy[i] = iy * iy;
      xy[i] = ix * iy;
    }
  }
  const auto kernel = gaussian_kernel(sigma);
  blur(xx, w, h, kernel);
  blur(yy, w, h, kernel);
  blur(xy, w, h, kernel);
  std::vector<double> resp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tr = xx[i] + yy[i];
    resp[i] = xx[i] * yy[i] - xy[i] * xy[i] - k * tr * tr;
  }
  return resp;
}

double reference_crossing_response(double k, double sigma, double derivative_sigma) {
  const int arm = 4 * static_cast<int>(std::ceil(3.0 * (sigma + derivative_sigma))) + 4;
  const int size = 2 * arm + 1;
  BinaryGrid cross(size, size);
  for (int i = 0; i < size; ++i) {
    cross.set(i, arm);
    cross.set(arm, i);
  }
  return harris_response(cross, k, sigma, derivative_sigma)[cross.index(arm, arm)];
}

std::vector<Corner> harris_corners(const BinaryGrid& g, const HarrisParams& params) {
  const int w = g.width(), h = g.height();
  if (w == 0 || h == 0 || g.count() == 0) return {};
  const auto resp = harris_response(g, params.k, params.sigma, params.derivative_sigma);
  const double peak = *std::max_element(resp.begin(), resp.end());
  if (!(peak > 0.0)) return {};
  const double threshold =
      params.rel_threshold *
      std::max(peak, reference_crossing_response(params.k, params.sigma, params.derivative_sigma));

  const auto R = [&](int c, int r) { return resp[g.index(c, r)]; };
  std::vector<Corner> peaks;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = R(c, r);
      if (!(v > threshold)) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr) {
        for (int dc = -1; dc <= 1 && is_max; ++dc) {
          if ((dr == 0 && dc == 0) || !g.in_bounds(c + dc, r + dr)) continue;
          const double nv = R(c + dc, r + dr);
          // Plateaus keep their first pixel in raster order.
          const bool earlier = dr < 0 || (dr == 0 && dc < 0);
          if (nv > v || (nv == v && earlier)) is_max = false;
        }
      }
      if (!is_max) continue;

      Vec2 pos(c, r);
      if (params.subpixel) {
        const auto offset = [](double lo, double mid, double hi) {
          const double denom = lo - 2.0 * mid + hi;
          if (!(denom < 0.0)) return 0.0;
          return std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
        };
        if (c > 0 && c + 1 < w) pos.x() += offset(R(c - 1, r), v, R(c + 1, r));
        if (r > 0 && r + 1 < h) pos.y() += offset(R(c, r - 1), v, R(c, r + 1));
      }
      peaks.push_back({pos, v});
    }
  }

  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Corner& a, const Corner& b) { return a.response > b.response; });
  std::vector<Corner> kept;
  for (const auto& p : peaks) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const Corner& q) {
      return (q.pixel - p.pixel).norm() < params.nms_radius;
    });
    if (clear) kept.push_back(p);
  }
  return kept;
}

}  // namespace jloc
