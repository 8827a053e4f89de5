#include "jloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace jloc {

GeoreferencedDetection georeference(int timestep, const Vec2& lidar_pos, const Pose2& gt_pose) {
  return {timestep, gt_pose.apply(lidar_pos), lidar_pos};
}

IntersectionNodeSet nodes_in_square(std::span<const IntersectionNode> nodes, const Vec2& center, double side) {
  IntersectionNodeSet out;
  const double half = side / 2.0;
  for (const auto& n : nodes) {
    const Vec2 d = n.position - center;
    if (std::abs(d.x()) < half && std::abs(d.y()) < half) out.push_back(n);
  }
  return out;
}

MatchRecord match_detection(const GeoreferencedDetection& det, std::span<const IntersectionNode> candidates,
                            double threshold_d) {
  MatchRecord m;
  m.detection = det;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& n : candidates) {
    const double d = (n.position - det.position).norm();
    if (d < best || (d == best && m.matched_node && n.id < m.matched_node->id)) {
      best = d;
      m.matched_node = n;
    }
  }
  if (m.matched_node) {
    m.center_error = best;
    if (best < threshold_d) m.verdict = Verdict::TruePositive;
  }
  return m;
}

int count_false_negatives(std::span<const IntersectionNode> roi_nodes, std::span<const MatchRecord> matches_at_k,
                          const Vec2& lidar_xy, double roi_size, double outer_radius, double threshold_d,
                          std::vector<NodeId>* missed) {
  int fn = 0;
  for (const auto& n : nodes_in_square(roi_nodes, lidar_xy, roi_size - 2.0 * outer_radius)) {
    const bool hit = std::any_of(matches_at_k.begin(), matches_at_k.end(), [&](const MatchRecord& m) {
      return m.matched_node && m.matched_node->id == n.id && *m.center_error < threshold_d;
    });
    if (!hit) {
      ++fn;
      if (missed) missed->push_back(n.id);
    }
  }
  return fn;
}

std::optional<double> compute_ace(std::span<const MatchRecord> matches, bool tp_only) {
  double sum = 0.0;
  long count = 0;
  for (const auto& m : matches) {
    if (!m.center_error) continue;
    if (tp_only && m.verdict != Verdict::TruePositive) continue;
    sum += *m.center_error;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

PrecisionRecall compute_pr_f1(long tp, long fp, long fn) {
  PrecisionRecall pr;
  if (tp + fp > 0) pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) pr.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (pr.precision && pr.recall && *pr.precision + *pr.recall > 0.0) {
    pr.f1 = 2.0 * *pr.precision * *pr.recall / (*pr.precision + *pr.recall);
  }
  return pr;
}

const ThresholdMetrics* EvalReport::at(double d) const {
  for (const auto& m : metrics) {
    if (std::abs(m.threshold_d - d) < 1e-9) return &m;
  }
  return nullptr;
}

std::vector<double> default_thresholds() {
  std::vector<double> d;
  for (int i = 1; i <= 20; ++i) d.push_back(0.5 * i);
  return d;
}

SequenceReport evaluate_sequence(const SequenceDetections& dets, const std::map<int, Pose2>& gt_poses,
                                 std::span<const IntersectionNode> nodes, const EvalSettings& settings,
                                 std::vector<MatchRecord>* matches_out) {
  SequenceReport rep;
  rep.name = dets.name;
  rep.detections = static_cast<long>(dets.lidar_positions.size());
  rep.metrics.reserve(settings.thresholds.size());
  for (double d : settings.thresholds) rep.metrics.push_back({d, 0, 0, 0, {}});

  std::vector<MatchRecord> all;
  for (int k : dets.timesteps) {
    auto gt = gt_poses.find(k);
    auto [first, last] = dets.lidar_positions.equal_range(k);
    if (gt == gt_poses.end()) {
      rep.excluded_detections += std::distance(first, last);
      continue;
    }
    ++rep.timesteps;
    const Vec2 lidar_xy = gt->second.translation();
    const auto roi_nodes = nodes_in_square(nodes, lidar_xy, settings.roi_size);

    std::vector<GeoreferencedDetection> geo;
    for (auto it = first; it != last; ++it) geo.push_back(georeference(k, it->second, gt->second));

    for (auto& tm : rep.metrics) {
      std::vector<MatchRecord> at_k;
      for (const auto& g : geo) at_k.push_back(match_detection(g, roi_nodes, tm.threshold_d));
      for (const auto& m : at_k) (m.verdict == Verdict::TruePositive ? tm.tp : tm.fp) += 1;
      const bool reference = std::abs(tm.threshold_d - settings.reference_d) < 1e-9;
      tm.fn += count_false_negatives(roi_nodes, at_k, lidar_xy, settings.roi_size, settings.outer_radius,
                                     tm.threshold_d, reference ? &rep.unmatched_zone_nodes : nullptr);
    }
    // Matching itself does not depend on D; keep one record set at the reference threshold.
    for (const auto& g : geo) all.push_back(match_detection(g, roi_nodes, settings.reference_d));
  }
  for (auto& tm : rep.metrics) tm.pr = compute_pr_f1(tm.tp, tm.fp, tm.fn);
  rep.ace = compute_ace(all, settings.ace_tp_only);
  rep.matched_pairs = std::count_if(all.begin(), all.end(), [](const MatchRecord& m) { return m.center_error.has_value(); });
  std::sort(rep.unmatched_zone_nodes.begin(), rep.unmatched_zone_nodes.end());
  rep.unmatched_zone_nodes.erase(std::unique(rep.unmatched_zone_nodes.begin(), rep.unmatched_zone_nodes.end()),
                                 rep.unmatched_zone_nodes.end());
  if (matches_out) matches_out->insert(matches_out->end(), all.begin(), all.end());
  return rep;
}

EvalReport aggregate(std::vector<SequenceReport> sequences, std::span<const MatchRecord> all_matches,
                     const EvalSettings& settings) {
  EvalReport r;
  r.ace_tp_only = settings.ace_tp_only;
  r.reference_d = settings.reference_d;
  for (double d : settings.thresholds) r.metrics.push_back({d, 0, 0, 0, {}});
  for (const auto& s : sequences) {
    for (std::size_t i = 0; i < r.metrics.size() && i < s.metrics.size(); ++i) {
      r.metrics[i].tp += s.metrics[i].tp;
      r.metrics[i].fp += s.metrics[i].fp;
      r.metrics[i].fn += s.metrics[i].fn;
    }
  }
  for (auto& m : r.metrics) m.pr = compute_pr_f1(m.tp, m.fp, m.fn);
  r.ace = compute_ace(all_matches, settings.ace_tp_only);
  r.sequences = std::move(sequences);
  return r;
}

}  // namespace jloc
