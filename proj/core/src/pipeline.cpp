#include "jloc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/os.h>
#include <nlohmann/json.hpp>

#include "jloc/error.hpp"

namespace jloc {

std::filesystem::path SequenceLayout::scan(int k) const { return dir / "velodyne" / fmt::format("{:06d}.bin", k); }
std::filesystem::path SequenceLayout::labels(int k) const { return dir / "labels" / fmt::format("{:06d}.label", k); }

FileSequence::FileSequence(std::filesystem::path dir) : layout_{std::move(dir)} {
  name_ = layout_.dir.filename().string();
  if (name_.empty() || name_ == ".") name_ = std::filesystem::absolute(layout_.dir).lexically_normal().filename().string();
  if (!std::filesystem::exists(layout_.poses())) {
    throw InputError(fmt::format("sequence '{}': missing {}", name_, layout_.poses().string()));
  }
  poses_ = read_poses(layout_.poses());
  for (int k = 0; k < static_cast<int>(poses_.size()); ++k) {
    if (!std::filesystem::exists(layout_.scan(k))) {
      throw InputError(fmt::format("sequence '{}', timestep {}: missing scan {}", name_, k, layout_.scan(k).string()));
    }
    if (!std::filesystem::exists(layout_.labels(k))) {
      throw InputError(fmt::format("sequence '{}', timestep {}: missing labels {}", name_, k, layout_.labels(k).string()));
    }
  }
  const int extra = static_cast<int>(poses_.size());
  if (std::filesystem::exists(layout_.scan(extra))) {
    throw InputError(fmt::format("sequence '{}', timestep {}: scan has no pose ({} poses)", name_, extra, poses_.size()));
  }
}

SemanticScan FileSequence::scan(int timestep) const {
  SemanticScan s;
  s.cloud = read_scan(layout_.scan(timestep));
  try {
    s.labels = read_labels(layout_.labels(timestep), s.cloud.size());
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("sequence '{}', timestep {}: {}", name_, timestep, e.what()));
  }
  return s;
}

MemorySequence::MemorySequence(std::string name, std::vector<SemanticScan> scans, std::vector<Pose3> poses)
    : name_(std::move(name)), scans_(std::move(scans)), poses_(std::move(poses)) {
  if (scans_.size() != poses_.size()) {
    throw InputError(fmt::format("sequence '{}': {} scans but {} poses", name_, scans_.size(), poses_.size()));
  }
  for (std::size_t k = 0; k < scans_.size(); ++k) {
    if (scans_[k].labels.size() != scans_[k].cloud.size()) {
      throw InputError(fmt::format("sequence '{}', timestep {}: label count differs from point count", name_, k));
    }
  }
}

MemorySequence::MemorySequence(std::string name, const SyntheticSequence& seq)
    : MemorySequence(std::move(name), seq.scans, seq.poses) {}

SemanticScan MemorySequence::scan(int timestep) const { return scans_.at(static_cast<std::size_t>(timestep)); }

NoisySequence::NoisySequence(const SequenceSource& inner, NoiseSpec spec, ClassId road, ClassId sentinel)
    : inner_(inner), spec_(std::move(spec)), road_(road), sentinel_(sentinel) {}

SemanticScan NoisySequence::scan(int timestep) const {
  SemanticScan s = inner_.scan(timestep);
  if (!spec_.is_identity()) s.labels = corrupt_labels(s.labels, spec_, timestep, road_, sentinel_);
  return s;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

DetectionRun run_detection(const SequenceSource& source, const DetectorParams& params, ClassId road_class,
                           int threads, const DebugSink& debug) {
  params.validate();
  DetectionRun run;
  run.name = source.name();
  const auto& poses = source.poses();
  const auto keys = select_keyframes(poses, params);

  std::vector<Keyframe> frames(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    frames[i].timestep = static_cast<int>(keys[i]);
    frames[i].pose = poses[keys[i]];
    frames[i].pose.source = Frame::Sensor;
    frames[i].pose.target = Frame::World;
    run.keyframes.push_back(frames[i].timestep);
  }

  const std::size_t n = static_cast<std::size_t>(params.n);
  const std::size_t batch = static_cast<std::size_t>(std::max(4, 2 * resolve_threads(threads)));
  std::vector<std::vector<RefinedIntersection>> results(keys.size());

  for (std::size_t b = 0; b < frames.size(); b += batch) {
    const std::size_t e = std::min(frames.size(), b + batch);
    const std::size_t lo = b >= n ? b - n : 0;
    const std::size_t hi = params.causal ? e - 1 : std::min(frames.size() - 1, e - 1 + n);

    for (std::size_t i = 0; i < lo; ++i) frames[i].road_world.reset();
    std::vector<std::size_t> missing;
    for (std::size_t i = lo; i <= hi; ++i) {
      if (!frames[i].road_world) missing.push_back(i);
    }
    parallel_for(missing.size(), threads, [&](std::size_t m) {
      const std::size_t i = missing[m];
      const SemanticScan scan = source.scan(frames[i].timestep);
      frames[i] = make_keyframe(frames[i].timestep, frames[i].pose, filter_road_points(scan, road_class));
    });

    parallel_for(e - b, threads, [&](std::size_t j) {
      const std::size_t c = b + j;
      const KeyframeWindow window = build_window(frames, c, params);
      const BinaryGrid bev = rasterize_bev(window, params);
      const BinaryGrid occ = infer_occupancy(bev, params);
      const BinaryGrid cen = extract_centerline(occ, params);
      const CandidateSet cands = detect_corners(cen, params, frames[c].timestep);
      results[c] = refine_candidates(cen, cands, frames[c].pose, params);
      if (debug) debug(DebugFrame{frames[c].timestep, bev, occ, cen});
    });
  }
  for (auto& r : results) run.detections.insert(run.detections.end(), r.begin(), r.end());
  return run;
}

void write_detections_text(const std::filesystem::path& path, const DetectionRun& run) {
  auto out = fmt::output_file(path.string());
  out.print("# k x y branch_count residual\n");
  for (const auto& d : run.detections) {
    out.print("{} {:.6f} {:.6f} {} {:.6f}\n", d.timestep, d.lidar_pos.x() + 0.0, d.lidar_pos.y() + 0.0, d.branch_count, d.residual);
  }
}

void write_detections_json(const std::filesystem::path& path, const DetectionRun& run) {
  nlohmann::ordered_json j;
  j["sequence"] = run.name;
  j["keyframes"] = run.keyframes;
  auto& dets = j["detections"] = nlohmann::ordered_json::array();
  for (const auto& d : run.detections) {
    dets.push_back({{"k", d.timestep},
                    {"x", d.lidar_pos.x()},
                    {"y", d.lidar_pos.y()},
                    {"branch_count", d.branch_count},
                    {"residual", d.residual},
                    {"pixel_col", d.pixel_pos.x()},
                    {"pixel_row", d.pixel_pos.y()},
                    {"refined", d.refined}});
  }
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

DetectionRun read_detections_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open detections '{}'", path.string()));
  DetectionRun run;
  try {
    const auto j = nlohmann::json::parse(in);
    run.name = j.at("sequence").get<std::string>();
    run.keyframes = j.at("keyframes").get<std::vector<int>>();
    for (const auto& d : j.at("detections")) {
      RefinedIntersection r;
      r.timestep = d.at("k").get<int>();
      r.lidar_pos = Vec2(d.at("x").get<double>(), d.at("y").get<double>());
      r.branch_count = d.at("branch_count").get<int>();
      r.residual = d.at("residual").get<double>();
      r.pixel_pos = Vec2(d.value("pixel_col", 0.0), d.value("pixel_row", 0.0));
      r.refined = d.value("refined", true);
      run.detections.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return run;
}

SequenceDetections to_sequence_detections(const DetectionRun& run) {
  SequenceDetections s;
  s.name = run.name;
  s.timesteps = run.keyframes;
  for (const auto& d : run.detections) s.lidar_positions.emplace(d.timestep, d.lidar_pos);
  return s;
}

}  // namespace jloc
