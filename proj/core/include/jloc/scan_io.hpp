#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "jloc/geometry.hpp"
#include "jloc/label_map.hpp"

namespace jloc {

/// A LiDAR scan with one class id per point.
struct SemanticScan {
  PointCloud cloud;
  std::vector<ClassId> labels;
};

/// Binary scan: little-endian float32 (x, y, z, intensity) per point. Intensity
/// is dropped. Throws ParseError on a truncated file or non-finite coordinate.
PointCloud read_scan(const std::filesystem::path& path);
/// Writes float32 quadruples with zero intensity.
void write_scan(const std::filesystem::path& path, const PointCloud& cloud);

/// Binary labels: one little-endian uint32 per point, semantic class in the
/// lower 16 bits.
std::vector<ClassId> read_labels(const std::filesystem::path& path, std::size_t count);
void write_labels(const std::filesystem::path& path, std::span<const ClassId> labels);

/// Text poses: 12 floats per line (row-major 3x4). Rotations are projected
/// back onto SO(3) when they drift.
std::vector<Pose3> read_poses(const std::filesystem::path& path);
void write_poses(const std::filesystem::path& path, std::span<const Pose3> poses);

}  // namespace jloc
