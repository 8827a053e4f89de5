#include <numbers>

#include <gtest/gtest.h>

#include "jloc/evaluation.hpp"

using namespace jloc;

namespace {

IntersectionNodeSet nodes(std::initializer_list<std::pair<NodeId, Vec2>> list) {
  IntersectionNodeSet out;
  for (const auto& [id, p] : list) out.push_back({id, p});
  return out;
}

GeoreferencedDetection det_at(const Vec2& p, int k = 0) { return {k, p, p}; }

}  // namespace

TEST(Georeference, Examples) {
  EXPECT_EQ(georeference(0, Vec2(2, 3), Pose2()).position, Vec2(2, 3));
  EXPECT_LT((georeference(0, Vec2(1, 0), Pose2(std::numbers::pi / 2, Vec2::Zero())).position - Vec2(0, 1)).norm(), 1e-15);
  EXPECT_EQ(georeference(0, Vec2(2, 3), Pose2(0, Vec2(100, 50))).position, Vec2(102, 53));
}

TEST(NodesInSquare, OpenBoundary) {
  const auto n = nodes({{1, Vec2(0, 0)}, {2, Vec2(120, 0)}, {3, Vec2(60, 0)}, {4, Vec2(59.999, -59.999)}});
  const auto in = nodes_in_square(n, Vec2::Zero(), 120);
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0].id, 1);
  EXPECT_EQ(in[1].id, 4);
}

TEST(Match, NearestNode) {
  const auto n = nodes({{1, Vec2(7, 0)}, {2, Vec2(0, 3)}});
  const auto m = match_detection(det_at(Vec2::Zero()), n, 5.0);
  ASSERT_TRUE(m.matched_node);
  EXPECT_EQ(m.matched_node->id, 2);
  EXPECT_DOUBLE_EQ(*m.center_error, 3.0);
  EXPECT_EQ(m.verdict, Verdict::TruePositive);
}

TEST(Match, EmptyCandidatesIsFalsePositive) {
  const auto m = match_detection(det_at(Vec2::Zero()), {}, 5.0);
  EXPECT_FALSE(m.matched_node);
  EXPECT_FALSE(m.center_error);
  EXPECT_EQ(m.verdict, Verdict::FalsePositive);
}

TEST(Match, ThresholdIsStrict) {
  const auto n = nodes({{1, Vec2(4.9, 0)}});
  EXPECT_EQ(match_detection(det_at(Vec2::Zero()), n, 5.0).verdict, Verdict::TruePositive);
  const auto far = nodes({{1, Vec2(5.0, 0)}});
  const auto m = match_detection(det_at(Vec2::Zero()), far, 5.0);
  EXPECT_EQ(m.verdict, Verdict::FalsePositive);
  EXPECT_TRUE(m.matched_node);  // still a matched pair for the ACE
}

TEST(Match, EquidistantTieGoesToLowestId) {
  const auto n = nodes({{9, Vec2(1, 0)}, {4, Vec2(-1, 0)}, {6, Vec2(0, 1)}});
  EXPECT_EQ(match_detection(det_at(Vec2::Zero()), n, 5.0).matched_node->id, 4);
}

TEST(FalseNegatives, Examples) {
  const auto in_zone = nodes({{1, Vec2(5, 5)}});
  EXPECT_EQ(count_false_negatives(in_zone, {}, Vec2::Zero(), 120, 40, 5), 1);

  const std::vector<MatchRecord> hit{match_detection(det_at(Vec2(6, 5)), in_zone, 5)};
  EXPECT_EQ(count_false_negatives(in_zone, hit, Vec2::Zero(), 120, 40, 5), 0);

  // 0.6 * S/2 = 36 m along x: inside the ROI, outside the 20 m zone.
  const auto outside = nodes({{1, Vec2(36, 0)}});
  EXPECT_EQ(count_false_negatives(outside, {}, Vec2::Zero(), 120, 40, 5), 0);
}

TEST(FalseNegatives, MatchBeyondThresholdDoesNotCount) {
  const auto n = nodes({{1, Vec2(0, 0)}});
  const std::vector<MatchRecord> m{match_detection(det_at(Vec2(6, 0)), n, 5)};
  EXPECT_EQ(count_false_negatives(n, m, Vec2::Zero(), 120, 40, 5), 1);
}

TEST(Ace, Examples) {
  MatchRecord a, b, fp;
  a.center_error = 1.0;
  a.verdict = Verdict::TruePositive;
  b.center_error = 3.0;
  b.verdict = Verdict::FalsePositive;
  std::vector<MatchRecord> one{a};
  one[0].center_error = 2.0;
  EXPECT_DOUBLE_EQ(*compute_ace(one), 2.0);
  std::vector<MatchRecord> two{a, b, fp};
  EXPECT_DOUBLE_EQ(*compute_ace(two), 2.0);
  EXPECT_DOUBLE_EQ(*compute_ace(two, true), 1.0);
  EXPECT_FALSE(compute_ace(std::vector<MatchRecord>{fp}));
}

TEST(PrecisionRecall, Examples) {
  const auto a = compute_pr_f1(1, 1, 0);
  EXPECT_DOUBLE_EQ(*a.precision, 0.5);
  EXPECT_DOUBLE_EQ(*a.recall, 1.0);
  EXPECT_DOUBLE_EQ(*a.f1, 2.0 / 3.0);
  const auto b = compute_pr_f1(0, 0, 5);
  EXPECT_FALSE(b.precision);
  EXPECT_DOUBLE_EQ(*b.recall, 0.0);
  EXPECT_FALSE(b.f1);
}

TEST(DefaultThresholds, HalfMeterSweep) {
  const auto d = default_thresholds();
  ASSERT_EQ(d.size(), 20u);
  EXPECT_EQ(d.front(), 0.5);
  EXPECT_EQ(d.back(), 10.0);
}

namespace {

EvalSettings settings() {
  EvalSettings s;
  s.thresholds = {1.0, 5.0};
  s.reference_d = 5.0;
  return s;
}

}  // namespace

TEST(EvaluateSequence, DetectionsOnNodesArePerfect) {
  const auto n = nodes({{1, Vec2(10, 10)}, {2, Vec2(200, 0)}});
  std::map<int, Pose2> gt{{0, Pose2(0.5, Vec2(5, 5))}, {1, Pose2(-0.3, Vec2(190, 3))}};
  SequenceDetections dets;
  dets.name = "s";
  dets.timesteps = {0, 1};
  for (const auto& [k, pose] : gt) {
    for (const auto& node : n) {
      if ((node.position - pose.translation()).cwiseAbs().maxCoeff() < 20) dets.lidar_positions.emplace(k, pose.inverse().apply(node.position));
    }
  }
  const auto rep = evaluate_sequence(dets, gt, n, settings());
  EXPECT_NEAR(*rep.ace, 0.0, 1e-12);
  for (const auto& m : rep.metrics) {
    EXPECT_EQ(m.tp, 2);
    EXPECT_EQ(m.fp, 0);
    EXPECT_EQ(m.fn, 0);
    EXPECT_DOUBLE_EQ(*m.pr.precision, 1.0);
  }
}

TEST(EvaluateSequence, NoDetectionsMeansZeroRecall) {
  const auto n = nodes({{1, Vec2(1, 1)}});
  std::map<int, Pose2> gt{{0, Pose2()}, {1, Pose2()}};
  SequenceDetections dets;
  dets.timesteps = {0, 1};
  const auto rep = evaluate_sequence(dets, gt, n, settings());
  EXPECT_FALSE(rep.ace);
  EXPECT_EQ(rep.metrics[1].fn, 2);
  EXPECT_DOUBLE_EQ(*rep.metrics[1].pr.recall, 0.0);
  EXPECT_FALSE(rep.metrics[1].pr.precision);
  EXPECT_EQ(rep.unmatched_zone_nodes, (std::vector<NodeId>{1}));
}

TEST(EvaluateSequence, MissingGroundTruthPoseExcludes) {
  const auto n = nodes({{1, Vec2(0, 0)}});
  std::map<int, Pose2> gt{{0, Pose2()}};
  SequenceDetections dets;
  dets.timesteps = {0, 5};
  dets.lidar_positions.emplace(0, Vec2(0.5, 0));
  dets.lidar_positions.emplace(5, Vec2(0.5, 0));
  const auto rep = evaluate_sequence(dets, gt, n, settings());
  EXPECT_EQ(rep.excluded_detections, 1);
  EXPECT_EQ(rep.timesteps, 1);
  EXPECT_EQ(rep.metrics[1].tp, 1);
}

TEST(EvaluateSequence, CountsPerThreshold) {
  const auto n = nodes({{1, Vec2(0, 0)}});
  std::map<int, Pose2> gt{{0, Pose2()}};
  SequenceDetections dets;
  dets.timesteps = {0};
  dets.lidar_positions.emplace(0, Vec2(3, 0));   // TP at 5, FP at 1
  dets.lidar_positions.emplace(0, Vec2(0, 30));  // nearest node 30 m away: FP at both
  const auto rep = evaluate_sequence(dets, gt, n, settings());
  EXPECT_EQ(rep.metrics[0].tp, 0);
  EXPECT_EQ(rep.metrics[0].fp, 2);
  EXPECT_EQ(rep.metrics[0].fn, 1);
  EXPECT_EQ(rep.metrics[1].tp, 1);
  EXPECT_EQ(rep.metrics[1].fp, 1);
  EXPECT_EQ(rep.metrics[1].fn, 0);
  EXPECT_DOUBLE_EQ(*rep.ace, (3.0 + 30.0) / 2.0);
}

TEST(Aggregate, SumsCountsAndPoolsAce) {
  const auto n = nodes({{1, Vec2(0, 0)}});
  std::map<int, Pose2> gt{{0, Pose2()}};
  SequenceDetections a, b;
  a.name = "a";
  b.name = "b";
  a.timesteps = b.timesteps = {0};
  a.lidar_positions.emplace(0, Vec2(1, 0));
  b.lidar_positions.emplace(0, Vec2(2, 0));
  b.lidar_positions.emplace(0, Vec2(0, 3));
  std::vector<MatchRecord> all;
  std::vector<SequenceReport> reps{evaluate_sequence(a, gt, n, settings(), &all),
                                   evaluate_sequence(b, gt, n, settings(), &all)};
  const auto r = aggregate(reps, all, settings());
  EXPECT_DOUBLE_EQ(*r.ace, 2.0);
  EXPECT_EQ(r.at(5.0)->tp, 3);
  EXPECT_EQ(r.at(1.0)->tp, 0);
  EXPECT_EQ(r.sequences.size(), 2u);
}
