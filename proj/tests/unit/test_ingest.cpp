#include <cstdint>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "jloc/error.hpp"
#include "jloc/georef_poses.hpp"
#include "jloc/label_map.hpp"
#include "jloc/projection.hpp"
#include "jloc/road_graph.hpp"
#include "jloc/scan_io.hpp"
#include "support.hpp"

using namespace jloc;
namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_u32(const fs::path& p, const std::vector<std::uint32_t>& v) {
  std::vector<std::uint8_t> bytes;
  for (auto x : v)
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  write_bytes(p, bytes);
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(ReadScan, TwoZeroQuadruples) {
  const auto dir = test::scratch_dir("scan_zero");
  write_bytes(dir / "a.bin", std::vector<std::uint8_t>(32, 0));
  const auto cloud = read_scan(dir / "a.bin");
  ASSERT_EQ(cloud.size(), 2u);
  EXPECT_EQ(cloud.points[0], Vec3::Zero());
  EXPECT_EQ(cloud.points[1], Vec3::Zero());
}

TEST(ReadScan, EmptyFile) {
  const auto dir = test::scratch_dir("scan_empty");
  write_bytes(dir / "a.bin", {});
  EXPECT_TRUE(read_scan(dir / "a.bin").empty());
}

TEST(ReadScan, TruncatedFileReportsOffset) {
  const auto dir = test::scratch_dir("scan_trunc");
  write_bytes(dir / "a.bin", std::vector<std::uint8_t>(17, 0));
  try {
    read_scan(dir / "a.bin");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos) << e.what();
  }
}

TEST(ReadScan, RoundTripsThroughWriter) {
  const auto dir = test::scratch_dir("scan_rt");
  PointCloud c;
  c.points = {Vec3(1.5, -2.25, 0.125), Vec3(100, 200, -3)};
  write_scan(dir / "a.bin", c);
  EXPECT_EQ(fs::file_size(dir / "a.bin"), 32u);
  EXPECT_EQ(read_scan(dir / "a.bin").points, c.points);
}

TEST(ReadLabels, MasksInstanceBits) {
  const auto dir = test::scratch_dir("labels");
  write_u32(dir / "a.label", {0x00000028u, 0x00010028u, 0x00000030u});
  const auto labels = read_labels(dir / "a.label", 3);
  EXPECT_EQ(labels, (std::vector<ClassId>{40, 40, 48}));
  EXPECT_EQ(LabelMap::semantic_kitti().name(labels[0]), "road");
}

TEST(ReadLabels, CountMismatchThrows) {
  const auto dir = test::scratch_dir("labels_mismatch");
  write_u32(dir / "a.label", {40, 40});
  EXPECT_THROW(read_labels(dir / "a.label", 3), ParseError);
}

TEST(ReadPoses, Examples) {
  const auto dir = test::scratch_dir("poses");
  write_text(dir / "p.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 5 0 1 0 0 0 0 1 0\n");
  const auto poses = read_poses(dir / "p.txt");
  ASSERT_EQ(poses.size(), 2u);
  EXPECT_TRUE(poses[0].rotation.isIdentity());
  EXPECT_EQ(poses[0].translation, Vec3::Zero());
  EXPECT_EQ(poses[1].translation, Vec3(5, 0, 0));
}

TEST(ReadPoses, ElevenNumbersNamesTheLine) {
  const auto dir = test::scratch_dir("poses_bad");
  write_text(dir / "p.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 0 0 1 0 0 0 0 1\n");
  try {
    read_poses(dir / "p.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("p.txt:2:"), std::string::npos) << e.what();
  }
}

TEST(ReadPoses, RoundTripIsExact) {
  const auto dir = test::scratch_dir("poses_rt");
  std::vector<Pose3> poses{Pose3::from_rpy(0.01, -0.02, 1.3, Vec3(12.345678901234, -0.1, 3))};
  write_poses(dir / "p.txt", poses);
  const auto back = read_poses(dir / "p.txt");
  EXPECT_EQ(back[0].translation, poses[0].translation);
  EXPECT_LT((back[0].rotation - poses[0].rotation).norm(), 1e-15);
}

TEST(LabelMap, DefaultHasRequiredClasses) {
  const auto m = LabelMap::semantic_kitti();
  EXPECT_EQ(m.require("road"), 40);
  EXPECT_EQ(m.require("sidewalk"), 48);
  EXPECT_EQ(m.require("parking"), 44);
  EXPECT_EQ(m.require("other-ground"), 49);
  EXPECT_THROW(m.require("lava"), ConfigError);
}

TEST(LabelMap, LoadsFromFile) {
  const auto dir = test::scratch_dir("labelmap");
  write_text(dir / "m.txt", "# id name\n7 road\n8 sidewalk\n");
  const auto m = LabelMap::load(dir / "m.txt");
  EXPECT_EQ(m.require("road"), 7);
  EXPECT_FALSE(m.find("parking"));
}

TEST(Projection, RoundTripWithinTolerance) {
  const LocalProjection proj({49.0, 8.4});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  for (int i = 0; i < 100; ++i) {
    const GeodeticPoint g{49.0 + d(rng), 8.4 + d(rng)};
    const GeodeticPoint back = proj.inverse(proj.forward(g));
    EXPECT_NEAR(back.lat, g.lat, 1e-7);
    EXPECT_NEAR(back.lon, g.lon, 1e-7);
  }
  EXPECT_LT(proj.forward({49.0, 8.4}).norm(), 1e-9);
}

TEST(Projection, MetricScaleIsPlausible) {
  const LocalProjection proj({49.0, 8.4});
  // One arc-minute of latitude is about 1853 m at 49 deg.
  EXPECT_NEAR(proj.forward({49.0 + 1.0 / 60, 8.4}).y(), 1853.0, 3.0);
}

TEST(RoadGraph, TwoNodesOneEdge) {
  const auto dir = test::scratch_dir("graph2");
  write_text(dir / "g.txt", "N 1 49.0 8.4\nN 2 49.001 8.4\nE 1 2\n");
  const auto g = load_road_graph(dir / "g.txt", LocalProjection({49.0, 8.4}));
  const auto deg = g.degrees();
  EXPECT_EQ(deg.at(1), 1);
  EXPECT_EQ(deg.at(2), 1);
}

TEST(RoadGraph, DuplicateEdgeCollapses) {
  const auto dir = test::scratch_dir("graph_dup");
  write_text(dir / "g.txt", "N 1 49.0 8.4\nN 2 49.001 8.4\nE 1 2\nE 2 1\nE 1 2\n");
  EXPECT_EQ(load_road_graph(dir / "g.txt", LocalProjection({49.0, 8.4})).edges.size(), 1u);
}

TEST(RoadGraph, DanglingEdgeNamesNode) {
  const auto dir = test::scratch_dir("graph_dangling");
  write_text(dir / "g.txt", "N 1 49.0 8.4\nE 1 77\n");
  try {
    load_road_graph(dir / "g.txt", LocalProjection({49.0, 8.4}));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("77"), std::string::npos) << e.what();
  }
}

namespace {
RoadGraph star(int arms) {
  RoadGraph g;
  for (NodeId i = 1; i <= arms + 1; ++i) g.nodes[i] = GraphNode{{}, Vec2(static_cast<double>(i), 0)};
  for (NodeId i = 2; i <= arms + 1; ++i) g.add_edge(1, i);
  return g;
}
}  // namespace

TEST(IntersectionNodes, Examples) {
  RoadGraph chain;
  for (NodeId i = 1; i <= 5; ++i) chain.nodes[i] = {};
  for (NodeId i = 1; i < 5; ++i) chain.add_edge(i, i + 1);
  EXPECT_TRUE(extract_intersection_nodes(chain).empty());

  const auto cross = extract_intersection_nodes(star(4));
  ASSERT_EQ(cross.size(), 1u);
  EXPECT_EQ(cross[0].id, 1);
  EXPECT_EQ(star(4).degrees().at(1), 4);

  const auto tee = extract_intersection_nodes(star(3));
  ASSERT_EQ(tee.size(), 1u);
  EXPECT_EQ(tee[0].id, 1);
}

TEST(RoadGraph, WriteThenLoadKeepsTopology) {
  const auto dir = test::scratch_dir("graph_rt");
  const LocalProjection proj({49.0, 8.4});
  RoadGraph g;
  for (NodeId i = 1; i <= 5; ++i) {
    const GeodeticPoint geo{49.0 + 0.001 * static_cast<double>(i % 3), 8.4 + 0.001 * static_cast<double>(i)};
    g.nodes[i] = GraphNode{geo, proj.forward(geo)};
  }
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(2, 4);
  g.add_edge(2, 5);
  write_road_graph(dir / "g.txt", g);
  const auto back = load_road_graph(dir / "g.txt", proj);
  EXPECT_EQ(back.edges, g.edges);
  for (const auto& [id, n] : g.nodes) EXPECT_LT((back.nodes.at(id).xy - n.xy).norm(), 1e-3);
}

TEST(GeorefPoses, GeodeticAnchorsAtFirstPose) {
  const auto dir = test::scratch_dir("gtposes");
  write_text(dir / "gt.txt", "0 49.0 8.4 90\n3 49.0001 8.4 0\n");
  const auto traj = load_georef_poses(dir / "gt.txt", Pose3::identity(), std::nullopt);
  ASSERT_NE(traj.find(0), nullptr);
  EXPECT_EQ(traj.find(1), nullptr);
  EXPECT_LT(traj.find(0)->translation().norm(), 1e-9);
  EXPECT_NEAR(traj.find(0)->yaw(), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(traj.find(3)->translation().y(), 11.1, 0.1);
}

TEST(GeorefPoses, CalibrationIsAppliedOnTheRight) {
  const auto dir = test::scratch_dir("gtposes_calib");
  write_text(dir / "gt.txt", "0 49.0 8.4 90\n");
  const Pose3 calib = Pose3::from_translation({1, 0, 0});
  const auto traj = load_georef_poses(dir / "gt.txt", calib, std::nullopt);
  // Body faces north, the LiDAR sits 1 m ahead of it.
  EXPECT_LT((traj.find(0)->translation() - Vec2(0, 1)).norm(), 1e-9);
}

TEST(GeorefPoses, MetricFileNeedsProjectionOrigin) {
  const auto dir = test::scratch_dir("gtposes_metric");
  write_text(dir / "gt.txt", "0 1 0 0 5 0 1 0 6 0 0 1 0\n");
  EXPECT_THROW(load_georef_poses(dir / "gt.txt", Pose3::identity(), std::nullopt), ConfigError);
  const auto traj = load_georef_poses(dir / "gt.txt", Pose3::identity(), GeodeticPoint{49.0, 8.4});
  EXPECT_LT((traj.find(0)->translation() - Vec2(5, 6)).norm(), 1e-12);
}
