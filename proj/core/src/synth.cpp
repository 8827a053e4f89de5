#include "jloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "jloc/error.hpp"
#include "jloc/georef_poses.hpp"
#include "jloc/noise.hpp"

namespace jloc {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double distance_to_polyline(const Vec2& p, const std::vector<Vec2>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, distance_to_segment(p, line[i], line[i + 1]));
  return best;
}

struct Segment {
  Vec2 a, b;
  double half_width;
};

struct TrajectorySample {
  Vec2 position;
  double yaw;
};

std::vector<TrajectorySample> sample_trajectory(const SceneSpec& spec) {
  const auto& tr = spec.trajectory;
  if (tr.size() < 2) throw InputError("synthetic trajectory needs at least two vertices");
  if (!(spec.speed > 0.0) || !(spec.scan_rate > 0.0)) throw InputError("speed and scan rate must be positive");
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) cum.push_back(cum.back() + (tr[i + 1] - tr[i]).norm());
  const double total = cum.back();
  const double step = spec.speed / spec.scan_rate;

  std::vector<TrajectorySample> out;
  std::size_t seg = 0;
  for (long i = 0;; ++i) {
    const double s = step * static_cast<double>(i);
    if (s > total + 1e-9) break;
    while (seg + 2 < cum.size() && s > cum[seg + 1]) ++seg;
    const Vec2 a = tr[seg], b = tr[seg + 1];
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    const Vec2 d = b - a;
    out.push_back({a + t * d, std::atan2(d.y(), d.x())});
  }
  return out;
}

}  // namespace

std::vector<int> SceneGraph::degrees() const {
  std::vector<int> deg(nodes.size(), 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

SceneGraph scene_graph(const std::vector<RoadSpec>& roads) {
  SceneGraph g;
  const auto node_id = [&](const Vec2& p) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if ((g.nodes[i] - p).norm() < 1e-6) return static_cast<int>(i);
    }
    g.nodes.push_back(p);
    return static_cast<int>(g.nodes.size() - 1);
  };

  for (std::size_t ri = 0; ri < roads.size(); ++ri) {
    const auto& line = roads[ri].polyline;
    // (arc parameter, point) pairs along this road
    std::vector<std::pair<double, Vec2>> splits;
    double arc = 0.0;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const Vec2 p = line[i], r = line[i + 1] - line[i];
      const double len = r.norm();
      splits.push_back({arc, p});
      for (std::size_t rj = 0; rj < roads.size(); ++rj) {
        if (rj == ri) continue;
        const auto& other = roads[rj].polyline;
        for (std::size_t j = 0; j + 1 < other.size(); ++j) {
          const Vec2 q = other[j], s = other[j + 1] - other[j];
          const double denom = cross2(r, s);
          if (std::abs(denom) < 1e-12) continue;
          const double t = cross2(q - p, s) / denom;
          const double u = cross2(q - p, r) / denom;
          constexpr double tol = 1e-9;
          if (t < -tol || t > 1 + tol || u < -tol || u > 1 + tol) continue;
          splits.push_back({arc + std::clamp(t, 0.0, 1.0) * len, p + std::clamp(t, 0.0, 1.0) * r});
        }
      }
      arc += len;
    }
    splits.push_back({arc, line.back()});
    std::stable_sort(splits.begin(), splits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    int prev = -1;
    for (const auto& [t, p] : splits) {
      const int id = node_id(p);
      if (prev >= 0 && id != prev) {
        const auto e = std::minmax(prev, id);
        if (std::find(g.edges.begin(), g.edges.end(), std::pair<int, int>(e.first, e.second)) == g.edges.end()) {
          g.edges.emplace_back(e.first, e.second);
        }
      }
      prev = id;
    }
  }
  return g;
}

SyntheticSequence generate_sequence(const SceneSpec& spec) {
  if (spec.roads.empty()) throw InputError("synthetic scene has no roads");
  for (const auto& r : spec.roads) {
    if (!(r.width > 0.0) || r.polyline.size() < 2) throw InputError("every road needs a positive width and two vertices");
  }
  if (!(spec.density > 0.0) || !(spec.scan_range > 0.0)) throw InputError("density and scan range must be positive");

  const auto samples = sample_trajectory(spec);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool on_road = std::any_of(spec.roads.begin(), spec.roads.end(), [&](const RoadSpec& r) {
      return distance_to_polyline(samples[i].position, r.polyline) <= r.width / 2.0 + 1e-9;
    });
    if (!on_road) {
      throw InputError(fmt::format("synthetic trajectory leaves the road network at sample {} ({:.2f}, {:.2f})", i,
                                   samples[i].position.x(), samples[i].position.y()));
    }
  }

  SyntheticSequence seq;
  const Pose3 scene_from_first =
      Pose3::from_yaw(samples[0].yaw, Vec3(samples[0].position.x(), samples[0].position.y(), spec.sensor_height));
  const Pose3 world_from_scene = compose(Pose3::from_yaw(spec.odometry_yaw), scene_from_first.inverse());
  const Pose2 georef_from_scene =
      compose(Pose2(spec.georef_yaw, Vec2::Zero()), Pose2(0.0, -samples[0].position));
  seq.projection = LocalProjection(spec.anchor);

  const double area = std::numbers::pi * spec.scan_range * spec.scan_range;
  const auto draws = static_cast<std::size_t>(std::llround(spec.density * area));

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& smp = samples[i];
    const Pose3 scene_from_lidar =
        Pose3::from_yaw(smp.yaw, Vec3(smp.position.x(), smp.position.y(), spec.sensor_height));
    const Pose3 lidar_from_scene = scene_from_lidar.inverse();
    Pose3 world_from_lidar = compose(world_from_scene, scene_from_lidar);
    world_from_lidar.source = Frame::Sensor;
    world_from_lidar.target = Frame::World;
    seq.poses.push_back(world_from_lidar);
    seq.gt_poses[static_cast<int>(i)] = compose(georef_from_scene, Pose2(smp.yaw, smp.position));

    std::mt19937_64 rng(scan_seed(spec.seed, static_cast<int>(i)));
    std::vector<double> sector_start;
    if (spec.drop_sectors) {
      for (int s = 0; s < spec.dropped_sectors; ++s) sector_start.push_back(2.0 * std::numbers::pi * uniform01(rng));
    }

    // Bucket the segments that can reach each 2 m cell of the scan disk.
    constexpr double cell = 2.0;
    const int cells = static_cast<int>(std::ceil(2.0 * spec.scan_range / cell));
    const Vec2 corner = smp.position - Vec2::Constant(spec.scan_range);
    std::vector<std::vector<Segment>> buckets(static_cast<std::size_t>(cells * cells));
    {
      std::vector<Segment> near;
      for (const auto& r : spec.roads) {
        for (std::size_t j = 0; j + 1 < r.polyline.size(); ++j) {
          const double reach = spec.scan_range * std::sqrt(2.0) + r.width / 2.0 + spec.sidewalk_width;
          if (distance_to_segment(smp.position, r.polyline[j], r.polyline[j + 1]) <= reach) {
            near.push_back({r.polyline[j], r.polyline[j + 1], r.width / 2.0});
          }
        }
      }
      for (int cy = 0; cy < cells; ++cy) {
        for (int cx = 0; cx < cells; ++cx) {
          const Vec2 mid = corner + Vec2((cx + 0.5) * cell, (cy + 0.5) * cell);
          for (const auto& seg : near) {
            if (distance_to_segment(mid, seg.a, seg.b) <= seg.half_width + spec.sidewalk_width + cell) {
              buckets[static_cast<std::size_t>(cy * cells + cx)].push_back(seg);
            }
          }
        }
      }
    }

    SemanticScan scan;
    scan.cloud.frame = Frame::Sensor;
    for (std::size_t d = 0; d < draws; ++d) {
      const double rad = spec.scan_range * std::sqrt(uniform01(rng));
      const double ang = 2.0 * std::numbers::pi * uniform01(rng);
      const double z = spec.jitter * (2.0 * uniform01(rng) - 1.0);
      const Vec2 p = smp.position + rad * Vec2(std::cos(ang), std::sin(ang));

      const int cx = std::clamp(static_cast<int>((p.x() - corner.x()) / cell), 0, cells - 1);
      const int cy = std::clamp(static_cast<int>((p.y() - corner.y()) / cell), 0, cells - 1);
      bool road = false, sidewalk = false;
      for (const auto& seg : buckets[static_cast<std::size_t>(cy * cells + cx)]) {
        const double dist = distance_to_segment(p, seg.a, seg.b);
        if (dist <= seg.half_width) {
          road = true;
          break;
        }
        if (dist <= seg.half_width + spec.sidewalk_width) sidewalk = true;
      }
      if (!road && !sidewalk) continue;

      const Vec3 local = lidar_from_scene.apply(Vec3(p.x(), p.y(), z));
      if (!sector_start.empty()) {
        const double bearing = std::atan2(local.y(), local.x()) + std::numbers::pi;
        const bool hidden = std::any_of(sector_start.begin(), sector_start.end(), [&](double s0) {
          return std::fmod(bearing - s0 + 4.0 * std::numbers::pi, 2.0 * std::numbers::pi) < spec.sector_width;
        });
        if (hidden) continue;
      }
      scan.cloud.points.push_back(local);
      scan.labels.push_back(road ? spec.road_class : spec.sidewalk_class);
    }
    seq.scans.push_back(std::move(scan));
  }

  const SceneGraph sg = scene_graph(spec.roads);
  const auto deg = sg.degrees();
  for (std::size_t i = 0; i < sg.nodes.size(); ++i) {
    GraphNode node;
    node.xy = georef_from_scene.apply(sg.nodes[i]);
    node.geo = seq.projection.inverse(node.xy);
    node.xy = seq.projection.forward(node.geo);
    seq.gt_graph.nodes.emplace(static_cast<NodeId>(i + 1), node);
    if (deg[i] >= 3) seq.junctions_scene.push_back(sg.nodes[i]);
  }
  for (const auto& [a, b] : sg.edges) seq.gt_graph.add_edge(a + 1, b + 1);
  return seq;
}

void write_sequence(const SyntheticSequence& seq, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "velodyne");
  fs::create_directories(dir / "labels");
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    const std::string stem = fmt::format("{:06d}", i);
    write_scan(dir / "velodyne" / (stem + ".bin"), seq.scans[i].cloud);
    write_labels(dir / "labels" / (stem + ".label"), seq.scans[i].labels);
  }
  write_poses(dir / "poses.txt", seq.poses);
  write_georef_poses(dir / "gt_poses.txt", seq.gt_poses, seq.projection);
  write_road_graph(dir / "road_graph.txt", seq.gt_graph);
}

namespace scenes {

SceneSpec cross(double half_length) {
  SceneSpec s;
  s.roads = {{{Vec2(-250, 0), Vec2(250, 0)}, 8.0}, {{Vec2(0, -250), Vec2(0, 250)}, 8.0}};
  s.trajectory = {Vec2(-half_length, 0), Vec2(half_length, 0)};
  return s;
}

SceneSpec tee(double half_length) {
  SceneSpec s;
  s.roads = {{{Vec2(-250, 0), Vec2(250, 0)}, 8.0}, {{Vec2(0, 0), Vec2(0, 250)}, 8.0}};
  s.trajectory = {Vec2(-half_length, 0), Vec2(half_length, 0)};
  return s;
}

SceneSpec straight(double half_length) {
  SceneSpec s;
  s.roads = {{{Vec2(-250, 0), Vec2(250, 0)}, 8.0}};
  s.trajectory = {Vec2(-half_length, 0), Vec2(half_length, 0)};
  return s;
}

SceneSpec curve(double radius, double arc_length) {
  SceneSpec s;
  // Road extends past the driven arc so the scan never sees its ends.
  const double margin = 150.0;
  const double a0 = -(arc_length / 2.0 + margin) / radius, a1 = (arc_length / 2.0 + margin) / radius;
  const int steps = static_cast<int>(std::ceil((a1 - a0) / deg2rad(0.5)));
  RoadSpec road;
  road.width = 8.0;
  for (int i = 0; i <= steps; ++i) {
    const double a = a0 + (a1 - a0) * i / steps;
    road.polyline.emplace_back(radius * std::sin(a), radius - radius * std::cos(a));
  }
  s.roads = {road};
  const double t0 = -arc_length / 2.0 / radius, t1 = arc_length / 2.0 / radius;
  const int tsteps = static_cast<int>(std::ceil((t1 - t0) / deg2rad(0.5)));
  for (int i = 0; i <= tsteps; ++i) {
    const double a = t0 + (t1 - t0) * i / tsteps;
    s.trajectory.emplace_back(radius * std::sin(a), radius - radius * std::cos(a));
  }
  return s;
}

}  // namespace scenes

}  // namespace jloc
