#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "jloc/app.hpp"
#include "jloc/error.hpp"
#include "jloc/hashing.hpp"
#include "support.hpp"

using namespace jloc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes a short synthetic sequence once per test binary.
fs::path synthetic(const std::string& preset, double length = 60.0) {
  static std::map<std::string, fs::path> made;
  const std::string key = preset + std::to_string(length);
  if (auto it = made.find(key); it != made.end()) return it->second;
  const fs::path dir = test::scratch_dir("cli_seq_" + preset) / preset;
  SynthOptions o;
  o.preset = preset;
  o.output = dir;
  o.density = 12.0;
  o.length = length;
  cmd_synth(o);
  made[key] = dir;
  return dir;
}

RunConfig config_for(const fs::path& seq, const std::string& out) {
  RunConfig c;
  c.sequences = {seq};
  c.output_dir = test::scratch_dir(out);
  c.thresholds = {1.0, 5.0};
  return c;
}

}  // namespace

TEST(Config, TextRoundTrip) {
  RunConfig c;
  c.detector.resolution = 0.5;
  c.detector.close_radius_px = 3;
  c.delta_a_deg = 7.5;
  c.thresholds = {0.5, 6.9, 13.3};
  c.projection_origin = GeodeticPoint{49.01, 8.41};
  c.sequences = {"a/b", "c"};
  c.robustness_grid = {{0.05, 0.2}};
  c.seed = 18446744073709551615ull;
  const std::string text = c.to_text();
  const RunConfig back = parse_config_text(text);
  EXPECT_EQ(back.to_text(), text);
  EXPECT_EQ(back.detector.resolution, 0.5);
  EXPECT_EQ(back.detector.close_radius_px, 3);
  EXPECT_EQ(back.thresholds, c.thresholds);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_DOUBLE_EQ(back.detector_params().delta_a, deg2rad(7.5));
}

TEST(Config, DefaultsMatchPublishedParameters) {
  const DetectorParams p = RunConfig{}.detector_params();
  EXPECT_EQ(p.delta_p, 2.0);
  EXPECT_DOUBLE_EQ(p.delta_a, deg2rad(5.0));
  EXPECT_EQ(p.n, 20);
  EXPECT_EQ(p.roi_size, 120.0);
  EXPECT_EQ(p.resolution, 0.16);
  EXPECT_EQ(p.min_points, 5);
  EXPECT_EQ(p.inner_radius, 10.0);
  EXPECT_EQ(p.outer_radius, 40.0);
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_config_text("resolutoin = 0.2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("resolution 0.2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("n = many\n"), ConfigError);
}

TEST(Config, IncludeAndOverride) {
  const auto dir = test::scratch_dir("config_include");
  std::ofstream(dir / "base.cfg") << "resolution = 0.5\nn = 4  # fewer frames\n";
  std::ofstream(dir / "run.cfg") << "include base.cfg\nn = 6\n";
  const RunConfig c = load_config(dir / "run.cfg");
  EXPECT_EQ(c.detector.resolution, 0.5);
  EXPECT_EQ(c.detector.n, 6);
  std::ofstream(dir / "loop.cfg") << "include loop.cfg\n";
  EXPECT_THROW(load_config(dir / "loop.cfg"), ConfigError);
}

TEST(Config, OutputDirEnvOverride) {
  RunConfig c;
  ::setenv("JLOC_OUTPUT_DIR", "/tmp/jloc_env_out", 1);
  apply_env_overrides(c);
  ::unsetenv("JLOC_OUTPUT_DIR");
  EXPECT_EQ(c.output_dir, fs::path("/tmp/jloc_env_out"));
}

TEST(Config, ValidateCatchesBadRates) {
  RunConfig c;
  c.fpr = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Hashing, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Detect, StraightRoadGivesNothing) {
  const auto runs = cmd_detect(config_for(synthetic("straight"), "cli_straight"));
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_FALSE(runs[0].keyframes.empty());
  EXPECT_TRUE(runs[0].detections.empty());
}

TEST(Detect, CrossIsFoundNearJunction) {
  const RunConfig cfg = config_for(synthetic("cross"), "cli_cross");
  const auto runs = cmd_detect(cfg);
  ASSERT_FALSE(runs[0].detections.empty());
  // The vehicle drives along +x through the junction at 30 m from the start.
  bool near = false;
  for (const auto& d : runs[0].detections) {
    const double x_vehicle = static_cast<double>(d.timestep);  // 1 m per scan
    if (std::abs(x_vehicle - 30.0) < 20.0) near |= (d.lidar_pos - Vec2(30.0 - x_vehicle, 0)).norm() < 1.0;
  }
  EXPECT_TRUE(near);
  EXPECT_TRUE(fs::exists(cfg.output_dir / "cross" / "detections.txt"));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "cross" / "detections.json"));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "manifest.json"));
  EXPECT_EQ(read_detections_json(cfg.output_dir / "cross" / "detections.json").detections.size(),
            runs[0].detections.size());
  const std::string txt = slurp(cfg.output_dir / "cross" / "detections.txt");
  EXPECT_EQ(txt.rfind("# k x y branch_count residual\n", 0), 0u);
}

TEST(Detect, CoarseResolutionRuns) {
  RunConfig cfg = config_for(synthetic("cross"), "cli_coarse");
  cfg.detector.resolution = 0.5;
  EXPECT_NO_THROW(cmd_detect(cfg));
}

TEST(Detect, MissingScanNamesTimestep) {
  const auto dir = test::scratch_dir("cli_missing");
  fs::copy(synthetic("straight"), dir / "seq", fs::copy_options::recursive);
  fs::remove(dir / "seq" / "velodyne" / "000007.bin");
  try {
    cmd_detect(config_for(dir / "seq", "cli_missing_out"));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("timestep 7"), std::string::npos) << e.what();
  }
}

TEST(Evaluate, FromWrittenDetections) {
  const RunConfig cfg = config_for(synthetic("cross"), "cli_eval_det");
  cmd_detect(cfg);
  RunConfig ecfg = cfg;
  ecfg.output_dir = test::scratch_dir("cli_eval");
  const EvalReport r = cmd_evaluate(ecfg, cfg.output_dir);
  ASSERT_TRUE(r.ace);
  EXPECT_LT(*r.ace, 1.0);
  EXPECT_DOUBLE_EQ(*r.at(5.0)->pr.precision, 1.0);
  EXPECT_TRUE(fs::exists(ecfg.output_dir / "report.json"));
  EXPECT_TRUE(fs::exists(ecfg.output_dir / "report.txt"));
}

TEST(Evaluate, MetricPosesWithoutOriginIsConfigError) {
  const auto dir = test::scratch_dir("cli_metric");
  fs::copy(synthetic("straight"), dir / "seq", fs::copy_options::recursive);
  std::ofstream(dir / "seq" / "gt_poses.txt") << "0 1 0 0 0 0 1 0 0 0 0 1 0\n";
  RunConfig cfg = config_for(dir / "seq", "cli_metric_out");
  DetectionRun run;
  run.name = "seq";
  run.keyframes = {0};
  EXPECT_THROW(evaluate_runs(cfg, {run}), ConfigError);
}

TEST(Robustness, CleanCellEqualsCleanRun) {
  RunConfig cfg = config_for(synthetic("cross"), "cli_robust");
  cfg.robustness_grid = {{0.0, 0.0}, {0.05, 0.05}};
  const auto rows = cmd_robustness(cfg);
  ASSERT_EQ(rows.size(), 2u);
  const RunConfig clean = config_for(synthetic("cross"), "cli_robust_clean");
  cmd_detect(clean);
  EXPECT_EQ(slurp(cfg.output_dir / "cells" / "0-0" / "cross" / "detections.json"),
            slurp(clean.output_dir / "cross" / "detections.json"));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "robustness.txt"));
}

TEST(MeasureNoise, RecoversWrittenNoisyLabels) {
  RunConfig cfg = config_for(synthetic("straight"), "cli_noise");
  cfg.fpr = 0.1;
  cfg.fnr = 0.3;
  cfg.write_noisy_labels = true;
  cmd_detect(cfg);
  RunConfig m = cfg;
  m.output_dir = test::scratch_dir("cli_noise_measure");
  const auto res = cmd_measure_noise(m, synthetic("straight"), cfg.output_dir / "straight" / "labels");
  EXPECT_NEAR(res.meter.fnr(), 0.3, 1e-3);
  EXPECT_NEAR(res.meter.fpr(), 0.1, 2e-3);
}

TEST(DebugImages, WritesBitmaps) {
  RunConfig cfg = config_for(synthetic("straight"), "cli_debug");
  cfg.detector.resolution = 0.5;
  cmd_debug_images(cfg);
  EXPECT_TRUE(fs::exists(cfg.output_dir / "straight" / "debug" / "cen_000000.pbm"));
}

#ifdef JLOC_CLI_PATH
TEST(Cli, ExitCodes) {
  const std::string exe = JLOC_CLI_PATH;
  const auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  const auto out = test::scratch_dir("cli_exit");
  EXPECT_EQ(run("detect -s " + (out / "nope").string() + " -o " + out.string()), 1);
  EXPECT_EQ(run("detect --set bogus=1 -s " + synthetic("straight").string()), 2);
  EXPECT_EQ(run("detect --set resolution=-1 -s " + synthetic("straight").string()), 2);
  EXPECT_EQ(run("synth --preset straight --length 20 --density 1 -o " + (out / "s").string()), 0);
}
#endif
