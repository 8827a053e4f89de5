#include "jloc/app.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "jloc/error.hpp"
#include "jloc/georef_poses.hpp"
#include "jloc/hashing.hpp"
#include "jloc/road_graph.hpp"

namespace jloc {
namespace {

namespace fs = std::filesystem;

void require_sequences(const RunConfig& cfg) {
  if (cfg.sequences.empty()) throw ConfigError("no sequences configured");
}

std::map<std::string, std::string> input_digests(const RunConfig& cfg, bool with_ground_truth) {
  std::map<std::string, std::string> d;
  if (!cfg.label_map.empty()) d["label_map"] = sha256_file(cfg.label_map);
  if (with_ground_truth && !cfg.road_graph.empty()) d["road_graph"] = sha256_file(cfg.road_graph);
  for (const auto& dir : cfg.sequences) {
    const FileSequence seq(dir);
    const auto& lay = seq.layout();
    d[seq.name() + "/poses.txt"] = sha256_file(lay.poses());
    std::vector<fs::path> files;
    for (int k = 0; k < static_cast<int>(seq.poses().size()); ++k) {
      files.push_back(lay.scan(k));
      files.push_back(lay.labels(k));
    }
    d[seq.name() + "/scans+labels"] = sha256_files(files);
    if (with_ground_truth) {
      if (fs::exists(lay.gt_poses())) d[seq.name() + "/gt_poses.txt"] = sha256_file(lay.gt_poses());
      if (cfg.road_graph.empty() && fs::exists(lay.road_graph())) {
        d[seq.name() + "/road_graph.txt"] = sha256_file(lay.road_graph());
      }
    }
  }
  return d;
}

std::vector<fs::path> write_run(const fs::path& dir, const DetectionRun& run) {
  fs::create_directories(dir);
  const fs::path txt = dir / "detections.txt", json = dir / "detections.json", keys = dir / "keyframes.txt";
  write_detections_text(txt, run);
  write_detections_json(json, run);
  std::string k;
  for (int t : run.keyframes) k += fmt::format("{}\n", t);
  write_text_file(keys, k);
  return {txt, json, keys};
}

DebugSink pbm_sink(const fs::path& dir) {
  fs::create_directories(dir);
  return [dir](const DebugFrame& f) {
    write_pbm(dir / fmt::format("bev_{:06d}.pbm", f.timestep), f.bev);
    write_pbm(dir / fmt::format("occ_{:06d}.pbm", f.timestep), f.occupancy);
    write_pbm(dir / fmt::format("cen_{:06d}.pbm", f.timestep), f.centerline);
  };
}

std::string cell_label(double fpr, double fnr) { return fmt::format("{:g}-{:g}", 100.0 * fpr, 100.0 * fnr); }

}  // namespace

std::vector<DetectionRun> cmd_detect(const RunConfig& cfg) {
  cfg.validate();
  require_sequences(cfg);
  const LabelMap labels = cfg.labels();
  const ClassId road = labels.require(cfg.road_class);
  const ClassId sentinel = labels.require(cfg.sentinel_class);
  const NoiseSpec noise = cfg.noise(labels);
  const DetectorParams params = cfg.detector_params();

  fs::create_directories(cfg.output_dir);
  std::vector<fs::path> outputs;
  std::vector<DetectionRun> runs;
  for (const auto& dir : cfg.sequences) {
    const FileSequence files(dir);
    const NoisySequence source(files, noise, road, sentinel);
    const fs::path out = cfg.output_dir / files.name();
    DebugSink sink = cfg.debug_images ? pbm_sink(out / "debug") : DebugSink{};
    DetectionRun run = run_detection(source, params, road, cfg.threads, sink);
    for (const auto& p : write_run(out, run)) outputs.push_back(p);

    if (cfg.write_noisy_labels && !noise.is_identity()) {
      fs::create_directories(out / "labels");
      parallel_for(files.poses().size(), cfg.threads, [&](std::size_t k) {
        const auto scan = source.scan(static_cast<int>(k));
        write_labels(out / "labels" / fmt::format("{:06d}.label", k), scan.labels);
      });
    }
    runs.push_back(std::move(run));
  }
  const std::string text = cfg.to_text();
  write_text_file(cfg.output_dir / "config.txt", text);
  outputs.push_back(cfg.output_dir / "config.txt");
  write_manifest(cfg.output_dir, text, input_digests(cfg, false), outputs);
  return runs;
}

EvalReport evaluate_runs(const RunConfig& cfg, const std::vector<DetectionRun>& runs) {
  const EvalSettings settings = cfg.eval_settings();
  const Pose3 calibration = cfg.calibration_pose();
  std::vector<SequenceReport> reports;
  std::vector<MatchRecord> matches;
  for (const auto& dir : cfg.sequences) {
    const SequenceLayout lay{dir};
    const std::string name = FileSequence(dir).name();
    const auto run = std::find_if(runs.begin(), runs.end(), [&](const DetectionRun& r) { return r.name == name; });
    if (run == runs.end()) throw InputError(fmt::format("no detections for sequence '{}'", name));
    if (!fs::exists(lay.gt_poses())) throw InputError(fmt::format("sequence '{}': missing {}", name, lay.gt_poses().string()));
    const GeorefTrajectory gt = load_georef_poses(lay.gt_poses(), calibration, cfg.projection_origin);
    const fs::path graph_path = cfg.road_graph.empty() ? lay.road_graph() : cfg.road_graph;
    if (!fs::exists(graph_path)) throw InputError(fmt::format("sequence '{}': missing road graph {}", name, graph_path.string()));
    const RoadGraph graph = load_road_graph(graph_path, gt.projection);
    const auto nodes = extract_intersection_nodes(graph);
    reports.push_back(evaluate_sequence(to_sequence_detections(*run), gt.poses, nodes, settings, &matches));
  }
  return aggregate(std::move(reports), matches, settings);
}

EvalReport cmd_evaluate(const RunConfig& cfg, const fs::path& detections_dir) {
  cfg.validate();
  require_sequences(cfg);
  std::vector<DetectionRun> runs;
  std::map<std::string, std::string> digests = input_digests(cfg, true);
  for (const auto& dir : cfg.sequences) {
    const std::string name = FileSequence(dir).name();
    const fs::path p = detections_dir / name / "detections.json";
    runs.push_back(read_detections_json(p));
    runs.back().name = name;
    digests[name + "/detections.json"] = sha256_file(p);
  }
  const EvalReport report = evaluate_runs(cfg, runs);
  write_report(cfg.output_dir, report);
  const std::string text = cfg.to_text();
  write_text_file(cfg.output_dir / "config.txt", text);
  write_manifest(cfg.output_dir, text, digests,
                 {cfg.output_dir / "report.json", cfg.output_dir / "report.txt", cfg.output_dir / "config.txt"});
  return report;
}

std::vector<RobustnessRow> cmd_robustness(const RunConfig& cfg) {
  cfg.validate();
  require_sequences(cfg);
  const LabelMap labels = cfg.labels();
  const ClassId road = labels.require(cfg.road_class);
  const ClassId sentinel = labels.require(cfg.sentinel_class);
  const DetectorParams params = cfg.detector_params();

  std::vector<FileSequence> sources;
  for (const auto& dir : cfg.sequences) sources.emplace_back(dir);

  std::vector<RobustnessRow> rows;
  std::vector<fs::path> outputs;
  for (const auto& [fpr, fnr] : cfg.robustness_grid) {
    RunConfig cell = cfg;
    cell.fpr = fpr;
    cell.fnr = fnr;
    const NoiseSpec noise = cell.noise(labels);
    const std::string label = cell_label(fpr, fnr);
    const fs::path cell_dir = cfg.output_dir / "cells" / label;

    std::vector<DetectionRun> runs;
    for (const auto& src : sources) {
      const NoisySequence noisy(src, noise, road, sentinel);
      runs.push_back(run_detection(noisy, params, road, cfg.threads));
      for (const auto& p : write_run(cell_dir / src.name(), runs.back())) outputs.push_back(p);
    }
    RobustnessRow row{label, fpr, fnr, evaluate_runs(cell, runs)};
    write_report(cell_dir, row.report);
    outputs.push_back(cell_dir / "report.json");
    outputs.push_back(cell_dir / "report.txt");
    rows.push_back(std::move(row));
  }

  write_text_file(cfg.output_dir / "robustness.json", robustness_to_json(rows).dump(2) + "\n");
  write_text_file(cfg.output_dir / "robustness.txt", robustness_table(rows));
  const std::string text = cfg.to_text();
  write_text_file(cfg.output_dir / "config.txt", text);
  for (const char* f : {"robustness.json", "robustness.txt", "config.txt"}) outputs.push_back(cfg.output_dir / f);
  write_manifest(cfg.output_dir, text, input_digests(cfg, true), outputs);
  return rows;
}

SceneSpec preset_scene(const SynthOptions& opt) {
  SceneSpec s;
  if (opt.preset == "cross") s = scenes::cross(opt.length / 2.0);
  else if (opt.preset == "tee") s = scenes::tee(opt.length / 2.0);
  else if (opt.preset == "straight") s = scenes::straight(opt.length / 2.0);
  else if (opt.preset == "curve") s = scenes::curve(opt.radius, opt.length);
  else throw ConfigError(fmt::format("unknown synth preset '{}' (cross, tee, straight, curve)", opt.preset));
  s.seed = opt.seed;
  s.density = opt.density;
  s.drop_sectors = opt.drop_sectors;
  s.odometry_yaw = deg2rad(opt.odometry_yaw_deg);
  return s;
}

void cmd_synth(const SynthOptions& opt) {
  if (opt.output.empty()) throw ConfigError("synth: output directory required");
  const SyntheticSequence seq = generate_sequence(preset_scene(opt));
  write_sequence(seq, opt.output);
}

NoiseMeasurement cmd_measure_noise(const RunConfig& cfg, const fs::path& truth_dir, const fs::path& predicted_dir) {
  const LabelMap labels = cfg.labels();
  const ClassId road = labels.require(cfg.road_class);
  std::vector<ClassId> confusion;
  for (const auto& c : cfg.confusion_classes) confusion.push_back(labels.require(c));

  const FileSequence truth(truth_dir);
  NoiseMeasurement m;
  for (int k = 0; k < static_cast<int>(truth.poses().size()); ++k) {
    const SemanticScan scan = truth.scan(k);
    const fs::path pred_path = predicted_dir / fmt::format("{:06d}.label", k);
    if (!fs::exists(pred_path)) throw InputError(fmt::format("timestep {}: missing predicted labels {}", k, pred_path.string()));
    const auto predicted = read_labels(pred_path, scan.cloud.size());
    m.meter.add(scan.labels, predicted, road, confusion);
    ++m.scans;
  }

  nlohmann::ordered_json j;
  j["scans"] = m.scans;
  j["road_points"] = m.meter.road_total;
  j["road_missed"] = m.meter.road_missed;
  j["confusion_points"] = m.meter.confusion_total;
  j["confusion_as_road"] = m.meter.confusion_as_road;
  j["fpr"] = m.meter.fpr();
  j["fnr"] = m.meter.fnr();
  fs::create_directories(cfg.output_dir);
  write_text_file(cfg.output_dir / "noise.json", j.dump(2) + "\n");
  return m;
}

void cmd_debug_images(const RunConfig& cfg) {
  cfg.validate();
  require_sequences(cfg);
  const LabelMap labels = cfg.labels();
  const ClassId road = labels.require(cfg.road_class);
  const ClassId sentinel = labels.require(cfg.sentinel_class);
  const NoiseSpec noise = cfg.noise(labels);
  for (const auto& dir : cfg.sequences) {
    const FileSequence files(dir);
    const NoisySequence source(files, noise, road, sentinel);
    run_detection(source, cfg.detector_params(), road, cfg.threads, pbm_sink(cfg.output_dir / files.name() / "debug"));
  }
}

}  // namespace jloc
