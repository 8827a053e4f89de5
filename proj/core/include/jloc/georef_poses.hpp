#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "jloc/geometry.hpp"
#include "jloc/projection.hpp"

namespace jloc {

/// Ground-truth LiDAR poses in the georeferenced frame (G), keyed by timestep,
/// together with the projection that defines (G).
struct GeorefTrajectory {
  LocalProjection projection{GeodeticPoint{}};
  std::map<int, Pose2> poses;

  const Pose2* find(int timestep) const {
    auto it = poses.find(timestep);
    return it == poses.end() ? nullptr : &it->second;
  }
};

/// Reads a ground-truth pose file. Two line layouts are accepted (one per file):
///   geodetic: "<k> <lat> <lon> <yaw_deg>"  yaw counter-clockwise from east
///   metric:   "<k> r00 r01 r02 tx r10 ... tz" already in (G)
/// `calibration` maps the LiDAR frame into the pose-source frame (GNSS/INS body),
/// so LiDAR pose = body pose * calibration.
///
/// Geodetic files anchor the projection at their first pose unless
/// `projection_origin` is given. Metric files cannot be tied to a road graph
/// without `projection_origin` and throw ConfigError.
GeorefTrajectory load_georef_poses(const std::filesystem::path& path, const Pose3& calibration,
                                   const std::optional<GeodeticPoint>& projection_origin);

/// Writes the geodetic layout.
void write_georef_poses(const std::filesystem::path& path, const std::map<int, Pose2>& poses,
                        const LocalProjection& projection);

}  // namespace jloc
