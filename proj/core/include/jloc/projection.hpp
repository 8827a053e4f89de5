#pragma once

#include <memory>

#include "jloc/geometry.hpp"

namespace jloc {

struct GeodeticPoint {
  double lat = 0.0;  // [deg]
  double lon = 0.0;  // [deg]
  bool operator==(const GeodeticPoint&) const = default;
};

/// Local transverse-Mercator projection on WGS84, with the anchor mapped to
/// (0, 0). x points east, y north (grid axes at the anchor meridian).
class LocalProjection {
 public:
  explicit LocalProjection(GeodeticPoint anchor);
  ~LocalProjection();
  LocalProjection(const LocalProjection&);
  LocalProjection& operator=(const LocalProjection&);
  LocalProjection(LocalProjection&&) noexcept;
  LocalProjection& operator=(LocalProjection&&) noexcept;

  const GeodeticPoint& anchor() const { return anchor_; }
  Vec2 forward(const GeodeticPoint& g) const;
  GeodeticPoint inverse(const Vec2& xy) const;

 private:
  struct Impl;
  GeodeticPoint anchor_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace jloc
