#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jloc/detector.hpp"
#include "jloc/evaluation.hpp"
#include "jloc/noise.hpp"
#include "jloc/refinement.hpp"
#include "jloc/scan_io.hpp"
#include "jloc/synth.hpp"

namespace jloc {

/// On-disk sequence layout:
///   velodyne/%06d.bin  labels/%06d.label  poses.txt  gt_poses.txt  road_graph.txt
struct SequenceLayout {
  std::filesystem::path dir;

  std::filesystem::path scan(int k) const;
  std::filesystem::path labels(int k) const;
  std::filesystem::path poses() const { return dir / "poses.txt"; }
  std::filesystem::path gt_poses() const { return dir / "gt_poses.txt"; }
  std::filesystem::path road_graph() const { return dir / "road_graph.txt"; }
};

/// A sequence of labelled scans with odometry. scan() must be safe to call
/// concurrently.
class SequenceSource {
 public:
  virtual ~SequenceSource() = default;
  virtual const std::string& name() const = 0;
  virtual const std::vector<Pose3>& poses() const = 0;
  virtual SemanticScan scan(int timestep) const = 0;
};

class FileSequence final : public SequenceSource {
 public:
  /// Reads the poses and checks that every timestep has a scan and a label file.
  explicit FileSequence(std::filesystem::path dir);

  const std::string& name() const override { return name_; }
  const std::vector<Pose3>& poses() const override { return poses_; }
  SemanticScan scan(int timestep) const override;
  const SequenceLayout& layout() const { return layout_; }

 private:
  SequenceLayout layout_;
  std::string name_;
  std::vector<Pose3> poses_;
};

class MemorySequence final : public SequenceSource {
 public:
  MemorySequence(std::string name, std::vector<SemanticScan> scans, std::vector<Pose3> poses);
  MemorySequence(std::string name, const SyntheticSequence& seq);

  const std::string& name() const override { return name_; }
  const std::vector<Pose3>& poses() const override { return poses_; }
  SemanticScan scan(int timestep) const override;

 private:
  std::string name_;
  std::vector<SemanticScan> scans_;
  std::vector<Pose3> poses_;
};

/// Applies corrupt_labels() to every scan of another source.
class NoisySequence final : public SequenceSource {
 public:
  NoisySequence(const SequenceSource& inner, NoiseSpec spec, ClassId road, ClassId sentinel);

  const std::string& name() const override { return inner_.name(); }
  const std::vector<Pose3>& poses() const override { return inner_.poses(); }
  SemanticScan scan(int timestep) const override;

 private:
  const SequenceSource& inner_;
  NoiseSpec spec_;
  ClassId road_;
  ClassId sentinel_;
};

struct DetectionRun {
  std::string name;
  std::vector<int> keyframes;  // timesteps that were processed
  std::vector<RefinedIntersection> detections;
};

struct DebugFrame {
  int timestep;
  const BinaryGrid& bev;
  const BinaryGrid& occupancy;
  const BinaryGrid& centerline;
};
/// Called from worker threads.
using DebugSink = std::function<void(const DebugFrame&)>;

/// Runs both stages on every keyframe. Results do not depend on `threads`.
DetectionRun run_detection(const SequenceSource& source, const DetectorParams& params, ClassId road_class,
                           int threads = 1, const DebugSink& debug = {});

/// Runs fn(0..count-1) on up to `threads` threads; rethrows the exception of the
/// lowest failing index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);
int resolve_threads(int requested);

/// "k x y branch_count residual" per detection after a header line.
void write_detections_text(const std::filesystem::path& path, const DetectionRun& run);
void write_detections_json(const std::filesystem::path& path, const DetectionRun& run);
DetectionRun read_detections_json(const std::filesystem::path& path);

SequenceDetections to_sequence_detections(const DetectionRun& run);

}  // namespace jloc
