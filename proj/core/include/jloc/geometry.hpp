#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace jloc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

enum class Frame { Unspecified, Sensor, World, Georeferenced };

const char* frame_name(Frame f);

/// Rigid transform in SE(3). Maps points expressed in `source` into `target`.
struct Pose3 {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  Frame source = Frame::Unspecified;
  Frame target = Frame::Unspecified;

  static Pose3 identity() { return {}; }
  static Pose3 from_translation(const Vec3& t);
  static Pose3 from_yaw(double yaw, const Vec3& t = Vec3::Zero());
  static Pose3 from_rpy(double roll, double pitch, double yaw, const Vec3& t = Vec3::Zero());

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose3 inverse() const;
};

/// Planar rigid transform, yaw kept in (-pi, pi].
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double yaw, const Vec2& translation);

  double yaw() const { return yaw_; }
  const Vec2& translation() const { return translation_; }
  Mat2 rotation() const;

  Vec2 apply(const Vec2& p) const { return rotation() * p + translation_; }
  Pose2 inverse() const;

 private:
  double yaw_ = 0.0;
  Vec2 translation_ = Vec2::Zero();
};

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::Sensor;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Wraps an angle to (-pi, pi].
double normalize_angle(double a);

constexpr double deg2rad(double d) { return d * 0.017453292519943295; }
constexpr double rad2deg(double r) { return r * 57.29577951308232; }

/// Returns the transform applying `b` first, then `a`.
Pose3 compose(const Pose3& a, const Pose3& b);
Pose2 compose(const Pose2& a, const Pose2& b);

/// Maps every point through `pose`. Throws InvariantError when the cloud's frame
/// does not match the pose's (specified) source frame.
PointCloud transform_points(const Pose3& pose, const PointCloud& cloud);

struct PoseDelta {
  double distance = 0.0;  // [m]
  double angle = 0.0;     // [rad], axis-angle magnitude
};
PoseDelta pose_delta(const Pose3& a, const Pose3& b);

/// SE(3) -> SE(2): yaw of the rotated x-axis projected onto the x-y plane.
/// Throws InvariantError when that axis is (near) vertical.
Pose2 project_to_pose2(const Pose3& p);

/// Projects a rotation back onto SO(3) (nearest orthonormal, det +1) when it
/// deviates from it by more than `tolerance`.
Mat3 orthonormalize(const Mat3& r, double tolerance = 1e-6);

bool is_rotation(const Mat3& r, double tolerance = 1e-9);

}  // namespace jloc
