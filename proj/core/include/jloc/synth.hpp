#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "jloc/geometry.hpp"
#include "jloc/label_map.hpp"
#include "jloc/projection.hpp"
#include "jloc/road_graph.hpp"
#include "jloc/scan_io.hpp"

namespace jloc {

struct RoadSpec {
  std::vector<Vec2> polyline;  // scene frame [m]
  double width = 8.0;
};

/// Flat synthetic scene: roads with sidewalk bands, a vehicle driving a
/// polyline, and a geodetic anchor for the ground truth.
struct SceneSpec {
  std::vector<RoadSpec> roads;
  double density = 30.0;        // points per m^2 per scan
  double scan_range = 50.0;     // [m]
  double sidewalk_width = 2.0;  // band on both sides of every road [m]
  std::vector<Vec2> trajectory;
  double speed = 10.0;      // [m/s]
  double scan_rate = 10.0;  // [Hz]
  std::uint64_t seed = 1;
  double jitter = 0.05;          // uniform z noise [m]
  double sensor_height = 1.73;   // [m]
  bool drop_sectors = false;     // emulate occlusions by removing angular sectors
  int dropped_sectors = 2;
  double sector_width = deg2rad(30.0);
  GeodeticPoint anchor{49.0, 8.4};  // geodetic position of the first pose
  double georef_yaw = deg2rad(20.0);  // heading of the scene frame inside (G)
  double odometry_yaw = 0.0;          // yaw of the first pose inside (W)
  ClassId road_class = 40;
  ClassId sidewalk_class = 48;
};

struct SyntheticSequence {
  std::vector<SemanticScan> scans;
  std::vector<Pose3> poses;           // T_WL
  std::map<int, Pose2> gt_poses;      // T_GL
  RoadGraph gt_graph;                 // node xy in (G)
  LocalProjection projection{GeodeticPoint{}};
  std::vector<Vec2> junctions_scene;  // degree >= 3 nodes, scene frame
};

/// Throws InputError when a trajectory sample leaves every road.
SyntheticSequence generate_sequence(const SceneSpec& spec);

/// Road graph of the scene: polyline vertices and pairwise crossings become
/// nodes, consecutive nodes along a road become edges. Positions in scene frame.
struct SceneGraph {
  std::vector<Vec2> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degrees() const;
};
SceneGraph scene_graph(const std::vector<RoadSpec>& roads);

/// Writes the sequence in the on-disk dataset layout.
void write_sequence(const SyntheticSequence& seq, const std::filesystem::path& dir);

namespace scenes {
/// Two perpendicular roads crossing at the origin, driven along x.
SceneSpec cross(double half_length = 90.0);
/// Side road joining a through road at the origin, driven along the through road.
SceneSpec tee(double half_length = 90.0);
SceneSpec straight(double half_length = 90.0);
/// Circular arc of the given radius, driven along the arc.
SceneSpec curve(double radius = 100.0, double arc_length = 180.0);
}  // namespace scenes

}  // namespace jloc
