#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "jloc/refinement.hpp"
#include "support.hpp"

using namespace jloc;

namespace {

Branch radial(const Vec2& cand, double angle, double r0, double r1) {
  Branch b;
  const Vec2 d(std::cos(angle), std::sin(angle));
  b.start = cand + r0 * d;
  b.center = cand + r1 * d;
  return b;
}

Branch through(const Vec2& a, const Vec2& b) {
  Branch br;
  br.start = a;
  br.center = b;
  return br;
}

// Spoke image: rays from `c` at the given angles, length `len`.
BinaryGrid spokes(int size, const Vec2& c, const std::vector<double>& angles, double len) {
  BinaryGrid g(size, size);
  for (double a : angles) test::draw_line(g, c, c + len * Vec2(std::cos(a), std::sin(a)));
  return g;
}

}  // namespace

TEST(Merge, CloseCandidatesCollapseToMidpoint) {
  CandidateSet c;
  c.points = {Vec2(100, 100), Vec2(103, 100)};
  c.responses = {1, 2};
  const auto m = merge_close_candidates(c, 62.5);
  ASSERT_EQ(m.points.size(), 1u);
  EXPECT_LT((m.points[0] - Vec2(101.5, 100)).norm(), 1e-12);
}

TEST(Merge, FarCandidatesUntouched) {
  CandidateSet c;
  c.points = {Vec2(100, 100), Vec2(300, 100)};
  EXPECT_EQ(merge_close_candidates(c, 62.5).points, c.points);
  EXPECT_TRUE(merge_close_candidates(CandidateSet{}, 62.5).points.empty());
}

TEST(Merge, ResultHasNoClosePairs) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 400);
  for (int t = 0; t < 20; ++t) {
    CandidateSet c;
    for (int i = 0; i < 15; ++i) c.points.emplace_back(u(rng), u(rng));
    const auto m = merge_close_candidates(c, 62.5);
    for (std::size_t i = 0; i < m.points.size(); ++i)
      for (std::size_t j = i + 1; j < m.points.size(); ++j) EXPECT_GE((m.points[i] - m.points[j]).norm(), 62.5);
  }
}

TEST(Branches, PlusGivesFourAtRightAngles) {
  const Vec2 c(150, 150);
  const auto g = spokes(301, c, {0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2}, 140);
  const auto br = segment_branches(g, c, {}, 62.5, 250);
  ASSERT_EQ(br.size(), 4u);
  std::vector<double> ang;
  for (const auto& b : br) ang.push_back(std::atan2(b.direction().y(), b.direction().x()));
  std::sort(ang.begin(), ang.end());
  for (std::size_t i = 0; i < 4; ++i) {
    const double gap = (i + 1 < 4 ? ang[i + 1] : ang[0] + 2 * std::numbers::pi) - ang[i];
    EXPECT_NEAR(gap, std::numbers::pi / 2, 0.02);
  }
  EXPECT_TRUE(classify(br));
}

TEST(Branches, StraightLineGivesTwo) {
  const Vec2 c(150, 150);
  BinaryGrid g(301, 301);
  test::draw_line(g, Vec2(5, 150), Vec2(295, 150));
  const auto br = segment_branches(g, c, {}, 62.5, 250);
  EXPECT_EQ(br.size(), 2u);
  EXPECT_FALSE(classify(br));
}

TEST(Branches, BlobNotTouchingInnerCircleExcluded) {
  const Vec2 c(150, 150);
  auto g = spokes(301, c, {0, 2.0, 4.0}, 140);
  test::draw_line(g, Vec2(150, 20), Vec2(150, 60));  // inside the annulus, away from the inner circle
  const auto br = segment_branches(g, c, {}, 62.5, 250);
  EXPECT_EQ(br.size(), 3u);
}

TEST(Classify, Counts) {
  std::vector<Branch> b;
  EXPECT_FALSE(classify(b));
  b.resize(2);
  EXPECT_FALSE(classify(b));
  b.resize(3);
  EXPECT_TRUE(classify(b));
}

TEST(Refine, PerpendicularLinesHitCrossing) {
  const Vec2 q(103, 97), cand(100, 100);
  std::vector<Branch> b{through(q + Vec2(-70, 0), q + Vec2(-120, 0)), through(q + Vec2(0, 70), q + Vec2(0, 120))};
  const auto r = refine_position(b, cand, 62.5);
  EXPECT_EQ(r.pixel, q);
  EXPECT_NEAR(r.residual, 0.0, 1e-18);
}

TEST(Refine, ConcurrentLinesAt120Degrees) {
  const Vec2 q(96, 104), cand(100, 100);
  std::vector<Branch> b;
  for (int i = 0; i < 3; ++i) b.push_back(radial(q, 2 * std::numbers::pi * i / 3 + 0.3, 65, 150));
  const auto r = refine_position(b, cand, 62.5);
  EXPECT_EQ(r.pixel, q);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
}

TEST(Refine, ParallelLinesAreDegenerate) {
  const Vec2 cand(100, 100);
  std::vector<Branch> b{through(Vec2(0, 90), Vec2(10, 90)), through(Vec2(0, 110), Vec2(10, 110)),
                        through(Vec2(5, 100), Vec2(50, 100))};
  EXPECT_THROW(refine_position(b, cand, 62.5), DegenerateGeometryError);
}

TEST(Refine, MatchesBruteForceOnNonConcurrentLines) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), jitter(-8, 8), rad(70, 200);
  for (int t = 0; t < 40; ++t) {
    const Vec2 cand(200 + jitter(rng), 200 + jitter(rng));
    std::vector<Branch> b;
    for (int i = 0; i < 3 + t % 3; ++i) {
      Branch br = radial(cand, ang(rng), 62.5, rad(rng));
      br.center += Vec2(jitter(rng), jitter(rng));
      b.push_back(br);
    }
    const auto fast = refine_position(b, cand, 62.5);
    const auto slow = test::brute_force_refine(b, cand, 62.5);
    EXPECT_EQ(fast.pixel, slow.pixel) << "config " << t;
    EXPECT_EQ(fast.residual, slow.residual);
  }
}

TEST(Refine, TieBreakPrefersPixelClosestToCandidate) {
  // Optimum at column 100.5: pixels 100 and 101 tie exactly.
  const std::vector<Branch> b{through(Vec2(100.5, 0), Vec2(100.5, 1)), through(Vec2(0, 100), Vec2(1, 100))};
  EXPECT_EQ(refine_position(b, Vec2(100.2, 100), 62.5).pixel, Vec2(100, 100));
  EXPECT_EQ(refine_position(b, Vec2(100.8, 100), 62.5).pixel, Vec2(101, 100));
  // Equal distance too: the smaller (row, col) wins.
  EXPECT_EQ(refine_position(b, Vec2(100.5, 100), 62.5).pixel, Vec2(100, 100));
  EXPECT_EQ(test::brute_force_refine(b, Vec2(100.5, 100), 62.5).pixel, Vec2(100, 100));
}

TEST(LidarFrame, CenterMapsToOrigin) {
  const BinaryGrid roi = BinaryGrid::roi(Vec2(10, -4), 120, 0.16);
  for (double yaw : {0.0, 0.7, -2.5}) {
    const Vec2 p = to_lidar_frame(roi.center_pixel(), Pose3::from_yaw(yaw, Vec3(10, -4, 1)), roi);
    EXPECT_LT(p.norm(), 1e-12);
  }
}

TEST(LidarFrame, OneColumnRightIsPlusR) {
  const BinaryGrid roi = BinaryGrid::roi(Vec2::Zero(), 120, 0.16);
  const Vec2 p = to_lidar_frame(roi.center_pixel() + Vec2(1, 0), Pose3::identity(), roi);
  EXPECT_NEAR(p.x(), 0.16, 1e-12);
  EXPECT_NEAR(p.y(), 0.0, 1e-12);
  const Vec2 up = to_lidar_frame(roi.center_pixel() + Vec2(0, -1), Pose3::identity(), roi);
  EXPECT_NEAR(up.y(), 0.16, 1e-12);
}

TEST(LidarFrame, RoundTripWithinCellDiagonal) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi), t(-100, 100), off(-55, 55);
  const double r = 0.16;
  for (int i = 0; i < 200; ++i) {
    const Pose3 pose = Pose3::from_yaw(yaw(rng), Vec3(t(rng), t(rng), 1.7));
    const BinaryGrid roi = BinaryGrid::roi(pose.translation.head<2>(), 120, r);
    const Vec2 w = pose.translation.head<2>() + Vec2(off(rng), off(rng));
    const auto px = roi.pixel_of(w);
    ASSERT_TRUE(px);
    const Vec2 back = to_lidar_frame(Vec2(px->col, px->row), pose, roi);
    const Vec2 truth = project_to_pose2(pose).inverse().apply(w);
    EXPECT_LE((back - truth).norm(), r * std::sqrt(2.0) / 2 + 1e-9);
  }
}

TEST(RefineCandidates, PlusImageGivesOneIntersection) {
  DetectorParams p;
  BinaryGrid g = BinaryGrid::roi(Vec2::Zero(), 120, 0.16);
  const Vec2 q = g.center_pixel() + Vec2(30, -20);
  test::draw_line(g, Vec2(0, q.y()), Vec2(750, q.y()));
  test::draw_line(g, Vec2(q.x(), 0), Vec2(q.x(), 750));
  const auto cands = detect_corners(g, p, 7);
  const auto out = refine_candidates(g, cands, Pose3::identity(), p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].timestep, 7);
  EXPECT_EQ(out[0].branch_count, 4);
  EXPECT_LT((out[0].pixel_pos - q).norm(), 1e-9);
  EXPECT_LT((out[0].lidar_pos - Vec2(30 * 0.16, 20 * 0.16)).norm(), 1e-9);
}
