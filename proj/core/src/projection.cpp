#include "jloc/projection.hpp"

#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/srs/projection.hpp>

#include "jloc/error.hpp"

namespace bg = boost::geometry;

namespace jloc {

using LatLon = bg::model::point<double, 2, bg::cs::geographic<bg::degree>>;
using Planar = bg::model::point<double, 2, bg::cs::cartesian>;

struct LocalProjection::Impl {
  explicit Impl(const GeodeticPoint& a)
      : proj(bg::srs::dpar::parameters<>(bg::srs::dpar::proj_tmerc)(bg::srs::dpar::ellps_wgs84)(
            bg::srs::dpar::lat_0, a.lat)(bg::srs::dpar::lon_0, a.lon)(bg::srs::dpar::k_0, 1.0)(
            bg::srs::dpar::x_0, 0.0)(bg::srs::dpar::y_0, 0.0)) {}
  bg::srs::projection<> proj;
};

LocalProjection::LocalProjection(GeodeticPoint anchor) : anchor_(anchor) {
  if (!std::isfinite(anchor.lat) || !std::isfinite(anchor.lon) || std::abs(anchor.lat) >= 90.0) {
    throw InputError("projection anchor out of range");
  }
  impl_ = std::make_unique<Impl>(anchor);
}

LocalProjection::~LocalProjection() = default;
LocalProjection::LocalProjection(const LocalProjection& o)
    : anchor_(o.anchor_), impl_(std::make_unique<Impl>(o.anchor_)) {}
LocalProjection& LocalProjection::operator=(const LocalProjection& o) {
  if (this != &o) {
    anchor_ = o.anchor_;
    impl_ = std::make_unique<Impl>(o.anchor_);
  }
  return *this;
}
LocalProjection::LocalProjection(LocalProjection&&) noexcept = default;
LocalProjection& LocalProjection::operator=(LocalProjection&&) noexcept = default;

Vec2 LocalProjection::forward(const GeodeticPoint& g) const {
  Planar out;
  impl_->proj.forward(LatLon(g.lon, g.lat), out);
  return {bg::get<0>(out), bg::get<1>(out)};
}

GeodeticPoint LocalProjection::inverse(const Vec2& xy) const {
  LatLon out;
  impl_->proj.inverse(Planar(xy.x(), xy.y()), out);
  return {bg::get<1>(out), bg::get<0>(out)};
}

}  // namespace jloc
