#pragma once

#include <vector>

#include "jloc/grid.hpp"

namespace jloc {

struct HarrisParams {
  double k = 0.04;
  double sigma = 2.0;          // Gaussian window [px]
  double rel_threshold = 0.2;  // fraction of the peak response
  double nms_radius = 63.0;    // [px]
  bool subpixel = true;
  double derivative_sigma = 1.0;  // Gaussian pre-smoothing before differencing [px]
};

/// Dense Harris response R = det(M) - k trace(M)^2. Gradients are central
/// differences of the image smoothed at `derivative_sigma` (0 disables it), so
/// the staircase of a rasterized diagonal does not read as a run of corners.
/// Row-major, same size as g.
std::vector<double> harris_response(const BinaryGrid& g, double k, double sigma, double derivative_sigma = 1.0);

/// Peak response of an ideal crossing of two one-pixel lines under (k, sigma).
/// Used as a floor for the relative threshold so images without any junction
/// (a lone segment whose end caps are its strongest response) yield nothing.
double reference_crossing_response(double k, double sigma, double derivative_sigma = 1.0);

struct Corner {
  Vec2 pixel;  // (col, row), sub-pixel
  double response = 0.0;
};

/// Thresholded local maxima of the Harris response, strongest first, with
/// greedy non-maximum suppression so that no two survivors are closer than
/// `nms_radius`.
std::vector<Corner> harris_corners(const BinaryGrid& g, const HarrisParams& params);

}  // namespace jloc
