#include "jloc/georef_poses.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "jloc/error.hpp"

namespace jloc {
namespace {

struct RawLine {
  int timestep;
  std::vector<double> values;
  int lineno;
};

}  // namespace

GeorefTrajectory load_georef_poses(const std::filesystem::path& path, const Pose3& calibration,
                                   const std::optional<GeodeticPoint>& projection_origin) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ground-truth poses " + path.string());

  std::vector<RawLine> lines;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    RawLine raw{0, {}, lineno};
    if (!(ss >> raw.timestep)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(fmt::format("{}:{}: expected a timestep index", path.string(), lineno));
    }
    double v;
    while (ss >> v) raw.values.push_back(v);
    if (!ss.eof()) throw ParseError(fmt::format("{}:{}: unparseable number", path.string(), lineno));
    lines.push_back(std::move(raw));
  }
  if (lines.empty()) throw InputError("no ground-truth poses in " + path.string());

  const std::size_t layout = lines.front().values.size();
  if (layout != 3 && layout != 12) {
    throw ParseError(fmt::format("{}:{}: expected 3 (lat lon yaw) or 12 (3x4 matrix) values after the timestep",
                                 path.string(), lines.front().lineno));
  }

  const Pose2 calib2 = project_to_pose2(calibration);
  std::optional<GeodeticPoint> anchor = projection_origin;
  if (layout == 3 && !anchor) anchor = GeodeticPoint{lines.front().values[0], lines.front().values[1]};
  if (!anchor) {
    throw ConfigError(path.string() +
                      ": metric ground-truth poses carry no geodetic reference; set projection_origin "
                      "so the road graph can be projected into the same frame");
  }

  GeorefTrajectory traj{LocalProjection(*anchor), {}};
  for (const auto& raw : lines) {
    if (raw.values.size() != layout) {
      throw ParseError(fmt::format("{}:{}: mixed line layouts ({} values, expected {})", path.string(),
                                   raw.lineno, raw.values.size(), layout));
    }
    Pose2 lidar;
    if (layout == 3) {
      const Vec2 xy = traj.projection.forward({raw.values[0], raw.values[1]});
      lidar = compose(Pose2(deg2rad(raw.values[2]), xy), calib2);
    } else {
      const auto& v = raw.values;
      Pose3 body;
      body.rotation << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
      body.translation << v[3], v[7], v[11];
      body.rotation = orthonormalize(body.rotation);
      lidar = project_to_pose2(compose(body, calibration));
    }
    if (!traj.poses.emplace(raw.timestep, lidar).second) {
      throw ParseError(fmt::format("{}:{}: duplicate timestep {}", path.string(), raw.lineno, raw.timestep));
    }
  }
  return traj;
}

void write_georef_poses(const std::filesystem::path& path, const std::map<int, Pose2>& poses,
                        const LocalProjection& projection) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& [k, p] : poses) {
    const GeodeticPoint g = projection.inverse(p.translation());
    out << fmt::format("{} {:.12f} {:.12f} {:.12f}\n", k, g.lat, g.lon, rad2deg(p.yaw()));
  }
}

}  // namespace jloc
