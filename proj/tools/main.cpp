#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "jloc/app.hpp"
#include "jloc/error.hpp"
#include "jloc/refinement.hpp"
#include "jloc/version.hpp"

namespace {

enum Exit { kOk = 0, kInput = 1, kConfig = 2, kInternal = 3 };

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::string> sequences;
  std::string output;
  int threads = -1;
};

void add_common(CLI::App* cmd, Common& c, bool with_sequences = true) {
  cmd->add_option("-c,--config", c.config_path, "Config file (key = value)");
  cmd->add_option("--set", c.sets, "Override a config key, KEY=VALUE (repeatable)");
  if (with_sequences) cmd->add_option("-s,--sequence", c.sequences, "Sequence directory (repeatable)");
  cmd->add_option("-o,--output", c.output, "Output directory");
  cmd->add_option("-j,--threads", c.threads, "Worker threads (0 = all cores)");
}

jloc::RunConfig build_config(const Common& c) {
  jloc::RunConfig cfg = c.config_path.empty() ? jloc::RunConfig{} : jloc::load_config(c.config_path);
  jloc::apply_env_overrides(cfg);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw jloc::ConfigError(fmt::format("--set expects KEY=VALUE, got '{}'", kv));
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!c.sequences.empty()) {
    cfg.sequences.clear();
    for (const auto& s : c.sequences) cfg.sequences.emplace_back(s);
  }
  if (!c.output.empty()) cfg.output_dir = c.output;
  if (c.threads >= 0) cfg.threads = c.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road intersection detection from labelled LiDAR sequences"};
  app.set_version_flag("--version", std::string(jloc::kVersion));
  app.require_subcommand(1);

  Common detect_opts;
  bool causal = false, debug = false;
  double fpr = -1, fnr = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  auto* detect = app.add_subcommand("detect", "Detect intersections in each sequence");
  add_common(detect, detect_opts);
  detect->add_flag("--causal", causal, "Window uses past keyframes only");
  detect->add_flag("--debug-images", debug, "Dump BEV/occupancy/centerline bitmaps");
  detect->add_option("--fpr", fpr, "Injected r-FPR in [0,1]");
  detect->add_option("--fnr", fnr, "Injected r-FNR in [0,1]");
  detect->add_option("--seed", seed, "Noise seed")->each([&](const std::string&) { seed_set = true; });

  Common eval_opts;
  std::string detections_dir;
  bool tp_only = false;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate detections against the road graph");
  add_common(evaluate, eval_opts);
  evaluate->add_option("-d,--detections", detections_dir, "Directory written by detect")->required();
  evaluate->add_flag("--tp-only-ace", tp_only, "Average the center error over true positives only");

  Common robust_opts;
  auto* robustness = app.add_subcommand("robustness", "Detect and evaluate over the label-noise grid");
  add_common(robustness, robust_opts);

  jloc::SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Write a synthetic sequence");
  synth->add_option("--preset", synth_opts.preset, "cross | tee | straight | curve");
  synth->add_option("-o,--output", synth_opts.output, "Output sequence directory")->required();
  synth->add_option("--seed", synth_opts.seed);
  synth->add_option("--density", synth_opts.density, "Points per m^2 per scan");
  synth->add_option("--length", synth_opts.length, "Driven distance [m]");
  synth->add_option("--radius", synth_opts.radius, "Curve radius [m]");
  synth->add_option("--odometry-yaw", synth_opts.odometry_yaw_deg, "Yaw of the first pose in the odometry frame [deg]");
  synth->add_flag("--drop-sectors", synth_opts.drop_sectors, "Remove random angular sectors from every scan");

  Common noise_opts;
  std::string truth_dir, predicted_dir;
  auto* measure = app.add_subcommand("measure-noise", "Per-point FPR/FNR of predicted labels");
  add_common(measure, noise_opts, false);
  measure->add_option("--truth", truth_dir, "Sequence directory with ground-truth labels")->required();
  measure->add_option("--predicted", predicted_dir, "Directory of predicted .label files")->required();

  Common debug_opts;
  auto* debug_images = app.add_subcommand("debug-images", "Write intermediate bitmaps for every keyframe");
  add_common(debug_images, debug_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*detect) {
      auto cfg = build_config(detect_opts);
      if (causal) cfg.detector.causal = true;
      if (debug) cfg.debug_images = true;
      if (fpr >= 0) cfg.fpr = fpr;
      if (fnr >= 0) cfg.fnr = fnr;
      if (seed_set) cfg.seed = seed;
      const auto runs = jloc::cmd_detect(cfg);
      for (const auto& r : runs) {
        fmt::print("{}: {} keyframes, {} detections\n", r.name, r.keyframes.size(), r.detections.size());
      }
    } else if (*evaluate) {
      auto cfg = build_config(eval_opts);
      if (tp_only) cfg.ace_tp_only = true;
      const auto report = jloc::cmd_evaluate(cfg, detections_dir);
      fmt::print("{}", jloc::report_table(report));
    } else if (*robustness) {
      const auto rows = jloc::cmd_robustness(build_config(robust_opts));
      fmt::print("{}", jloc::robustness_table(rows));
    } else if (*synth) {
      jloc::cmd_synth(synth_opts);
    } else if (*measure) {
      const auto m = jloc::cmd_measure_noise(build_config(noise_opts), truth_dir, predicted_dir);
      fmt::print("scans {}  FPR {:.4f}  FNR {:.4f}\n", m.scans, m.meter.fpr(), m.meter.fnr());
    } else if (*debug_images) {
      jloc::cmd_debug_images(build_config(debug_opts));
    }
  } catch (const jloc::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const jloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
