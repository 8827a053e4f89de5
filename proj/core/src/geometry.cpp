#include "jloc/geometry.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "jloc/error.hpp"

namespace jloc {

const char* frame_name(Frame f) {
  switch (f) {
    case Frame::Unspecified: return "unspecified";
    case Frame::Sensor: return "sensor";
    case Frame::World: return "world";
    case Frame::Georeferenced: return "georeferenced";
  }
  return "?";
}

double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

Pose3 Pose3::from_translation(const Vec3& t) {
  Pose3 p;
  p.translation = t;
  return p;
}

Pose3 Pose3::from_yaw(double yaw, const Vec3& t) {
  Pose3 p;
  p.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  p.translation = t;
  return p;
}

Pose3 Pose3::from_rpy(double roll, double pitch, double yaw, const Vec3& t) {
  Pose3 p;
  p.rotation = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                Eigen::AngleAxisd(roll, Vec3::UnitX()))
                   .toRotationMatrix();
  p.translation = t;
  return p;
}

Pose3 Pose3::inverse() const {
  Pose3 inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  inv.source = target;
  inv.target = source;
  return inv;
}

Pose2::Pose2(double yaw, const Vec2& translation)
    : yaw_(normalize_angle(yaw)), translation_(translation) {}

Mat2 Pose2::rotation() const {
  const double c = std::cos(yaw_), s = std::sin(yaw_);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Pose2 Pose2::inverse() const {
  return Pose2(-yaw_, -(rotation().transpose() * translation_));
}

Pose3 compose(const Pose3& a, const Pose3& b) {
  if (a.source != Frame::Unspecified && b.target != Frame::Unspecified && a.source != b.target) {
    throw InvariantError(std::string("compose: frame chain broken (") + frame_name(b.target) +
                         " -> " + frame_name(a.source) + ")");
  }
  Pose3 c;
  c.rotation = a.rotation * b.rotation;
  c.translation = a.rotation * b.translation + a.translation;
  c.source = b.source;
  c.target = a.target;
  return c;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  return Pose2(a.yaw() + b.yaw(), a.rotation() * b.translation() + a.translation());
}

PointCloud transform_points(const Pose3& pose, const PointCloud& cloud) {
  if (pose.source != Frame::Unspecified && pose.source != cloud.frame) {
    throw InvariantError(std::string("transform_points: cloud is in frame '") +
                         frame_name(cloud.frame) + "' but pose maps from '" +
                         frame_name(pose.source) + "'");
  }
  PointCloud out;
  out.frame = pose.target != Frame::Unspecified ? pose.target : cloud.frame;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(pose.apply(p));
  return out;
}

PoseDelta pose_delta(const Pose3& a, const Pose3& b) {
  const Mat3 rel = a.rotation.transpose() * b.rotation;
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return {(b.translation - a.translation).norm(), std::acos(c)};
}

Pose2 project_to_pose2(const Pose3& p) {
  const Vec3 x_axis = p.rotation.col(0);
  if (std::hypot(x_axis.x(), x_axis.y()) < 1e-6) {
    throw InvariantError("project_to_pose2: rotated x-axis is vertical, yaw undefined");
  }
  return Pose2(std::atan2(x_axis.y(), x_axis.x()), p.translation.head<2>());
}

bool is_rotation(const Mat3& r, double tolerance) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tolerance &&
         std::abs(r.determinant() - 1.0) <= tolerance;
}

Mat3 orthonormalize(const Mat3& r, double tolerance) {
  if (is_rotation(r, tolerance)) return r;
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

}  // namespace jloc
