// Per-stage timings on one keyframe of a synthetic four-way crossing,
// default parameters (751 x 751 ROI, 41-keyframe window).

#include <benchmark/benchmark.h>

#include "jloc/detector.hpp"
#include "jloc/morphology.hpp"
#include "jloc/refinement.hpp"
#include "jloc/synth.hpp"
#include "jloc/thinning.hpp"

namespace {

using namespace jloc;

struct Fixture {
  DetectorParams params;
  std::vector<Keyframe> keyframes;
  std::size_t center = 0;
  KeyframeWindow window;
  BinaryGrid bev, occupancy, skeleton, centerline;
  CandidateSet candidates;

  Fixture() {
    SceneSpec spec = scenes::cross(90.0);
    spec.density = 30.0;
    const SyntheticSequence seq = generate_sequence(spec);
    for (std::size_t i : select_keyframes(seq.poses, params)) {
      keyframes.push_back(make_keyframe(static_cast<int>(i), seq.poses[i],
                                        filter_road_points(seq.scans[i], spec.road_class)));
    }
    center = keyframes.size() / 2;
    window = build_window(keyframes, center, params);
    bev = rasterize_bev(window, params);
    occupancy = infer_occupancy(bev, params);
    skeleton = extract_centerline(occupancy);
    centerline = extract_centerline(occupancy, params);
    candidates = detect_corners(centerline, params, keyframes[center].timestep);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Rasterize(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_bev(f.window, f.params));
}
BENCHMARK(BM_Rasterize)->Unit(benchmark::kMillisecond);

void BM_Morphology(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(infer_occupancy(f.bev, f.params));
}
BENCHMARK(BM_Morphology)->Unit(benchmark::kMillisecond);

void BM_Thinning(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(zhang_suen_thin(f.occupancy));
}
BENCHMARK(BM_Thinning)->Unit(benchmark::kMillisecond);

void BM_PruneSpurs(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(prune_spurs(f.skeleton, f.params.spur_length_px()));
}
BENCHMARK(BM_PruneSpurs)->Unit(benchmark::kMillisecond);

void BM_Harris(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(detect_corners(f.centerline, f.params));
}
BENCHMARK(BM_Harris)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
  const auto& f = fixture();
  const Pose3 pose = f.keyframes[f.center].pose;
  for (auto _ : state) benchmark::DoNotOptimize(refine_candidates(f.centerline, f.candidates, pose, f.params));
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
