#include "jloc/scan_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "jloc/error.hpp"

namespace jloc {
namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bits.begin(), bits.end());
    v = std::bit_cast<T>(bits);
  }
  return v;
}

template <typename T>
void store_le(std::ostream& out, T v) {
  auto bits = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(bits.data(), bits.size());
}

}  // namespace

PointCloud read_scan(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  constexpr std::size_t record = 16;
  if (bytes.size() % record != 0) {
    throw ParseError(fmt::format("{}: truncated point record at byte offset {} (file size {})",
                                 path.string(), bytes.size() - bytes.size() % record,
                                 bytes.size()));
  }
  PointCloud cloud;
  cloud.frame = Frame::Sensor;
  cloud.points.reserve(bytes.size() / record);
  for (std::size_t off = 0; off < bytes.size(); off += record) {
    const float x = load_le<float>(bytes.data() + off);
    const float y = load_le<float>(bytes.data() + off + 4);
    const float z = load_le<float>(bytes.data() + off + 8);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw ParseError(fmt::format("{}: non-finite coordinate at byte offset {}", path.string(), off));
    }
    cloud.points.emplace_back(x, y, z);
  }
  return cloud;
}

void write_scan(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& p : cloud.points) {
    store_le<float>(out, static_cast<float>(p.x()));
    store_le<float>(out, static_cast<float>(p.y()));
    store_le<float>(out, static_cast<float>(p.z()));
    store_le<float>(out, 0.0f);
  }
}

std::vector<ClassId> read_labels(const std::filesystem::path& path, std::size_t count) {
  const auto bytes = slurp(path);
  if (bytes.size() != 4 * count) {
    throw ParseError(fmt::format("{}: {} bytes of labels for {} points (expected {})",
                                 path.string(), bytes.size(), count, 4 * count));
  }
  std::vector<ClassId> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    labels[i] = static_cast<ClassId>(load_le<std::uint32_t>(bytes.data() + 4 * i) & 0xFFFFu);
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, std::span<const ClassId> labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  for (ClassId c : labels) store_le<std::uint32_t>(out, c);
}

std::vector<Pose3> read_poses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Pose3> poses;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    double v[12];
    int n = 0;
    double x;
    while (ss >> x) {
      if (n < 12) v[n] = x;
      ++n;
    }
    if (n != 12 || !ss.eof()) {
      throw ParseError(fmt::format("{}:{}: expected 12 numbers, got {}{}", path.string(), lineno, n,
                                   ss.eof() ? "" : " followed by garbage"));
    }
    Pose3 p;
    p.rotation << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
    p.translation << v[3], v[7], v[11];
    if (!p.rotation.allFinite() || !p.translation.allFinite()) {
      throw ParseError(fmt::format("{}:{}: non-finite pose", path.string(), lineno));
    }
    p.rotation = orthonormalize(p.rotation);
    p.source = Frame::Sensor;
    p.target = Frame::World;
    poses.push_back(p);
  }
  return poses;
}

void write_poses(const std::filesystem::path& path, std::span<const Pose3> poses) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& p : poses) {
    const auto& r = p.rotation;
    const auto& t = p.translation;
    out << fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n",
                       r(0, 0), r(0, 1), r(0, 2), t.x(), r(1, 0), r(1, 1), r(1, 2), t.y(), r(2, 0),
                       r(2, 1), r(2, 2), t.z());
  }
}

}  // namespace jloc
