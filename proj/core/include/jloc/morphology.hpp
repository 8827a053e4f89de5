#pragma once

#include "jloc/grid.hpp"

namespace jloc {

// Binary morphology with the digital disk {d : |d|^2 <= radius^2} as structuring
// element. Pixels outside the grid are background. Closing is evaluated on a
// padded domain so the intermediate dilation is never clipped, which keeps both
// closing and opening idempotent at the border.

BinaryGrid dilate(const BinaryGrid& g, int radius);
BinaryGrid erode(const BinaryGrid& g, int radius);
BinaryGrid morph_close(const BinaryGrid& g, int radius);
BinaryGrid morph_open(const BinaryGrid& g, int radius);

/// Exact squared Euclidean distance from every pixel to the nearest pixel with
/// `feature[i] != 0` (Felzenszwalb-Huttenlocher lower envelope). Pixels with no
/// feature anywhere get a large sentinel.
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& feature, int width, int height);

}  // namespace jloc
