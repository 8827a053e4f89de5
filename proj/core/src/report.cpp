#include "jloc/report.hpp"

#include <fstream>

#include <fmt/format.h>

#include "jloc/error.hpp"
#include "jloc/hashing.hpp"
#include "jloc/version.hpp"

namespace jloc {
namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); }

std::string pct(const std::optional<double>& v) { return v ? fmt::format("{:.2f}", 100.0 * *v) : std::string("n/a"); }
std::string meters(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string("n/a"); }

nlohmann::ordered_json metrics_json(const std::vector<ThresholdMetrics>& metrics) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : metrics) {
    arr.push_back({{"d", m.threshold_d},
                   {"tp", m.tp},
                   {"fp", m.fp},
                   {"fn", m.fn},
                   {"precision", opt(m.pr.precision)},
                   {"recall", opt(m.pr.recall)},
                   {"f1", opt(m.pr.f1)}});
  }
  return arr;
}

const ThresholdMetrics* metrics_at(const std::vector<ThresholdMetrics>& metrics, double d) {
  for (const auto& m : metrics) {
    if (std::abs(m.threshold_d - d) < 1e-9) return &m;
  }
  return nullptr;
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["ace"] = opt(report.ace);
  j["ace_tp_only"] = report.ace_tp_only;
  j["reference_d"] = report.reference_d;
  j["metrics"] = metrics_json(report.metrics);
  auto& seqs = j["sequences"] = nlohmann::ordered_json::array();
  for (const auto& s : report.sequences) {
    seqs.push_back({{"name", s.name},
                    {"ace", opt(s.ace)},
                    {"matched_pairs", s.matched_pairs},
                    {"detections", s.detections},
                    {"excluded_detections", s.excluded_detections},
                    {"timesteps", s.timesteps},
                    {"metrics", metrics_json(s.metrics)},
                    {"unmatched_zone_nodes", s.unmatched_zone_nodes}});
  }
  return j;
}

std::string report_table(const EvalReport& report) {
  std::string out;
  out += fmt::format("ACE [m]: {} ({})\n\n", meters(report.ace),
                     report.ace_tp_only ? "true positives only" : "all matched pairs");
  out += fmt::format("{:>6} {:>7} {:>7} {:>7} {:>8} {:>8} {:>8}\n", "D [m]", "TP", "FP", "FN", "Pre [%]", "Rec [%]",
                     "F1 [%]");
  for (const auto& m : report.metrics) {
    out += fmt::format("{:>6.1f} {:>7} {:>7} {:>7} {:>8} {:>8} {:>8}\n", m.threshold_d, m.tp, m.fp, m.fn,
                       pct(m.pr.precision), pct(m.pr.recall), pct(m.pr.f1));
  }
  if (!report.sequences.empty()) {
    out += fmt::format("\nPer sequence at D = {} m\n", report.reference_d);
    out += fmt::format("{:<12} {:>9} {:>6} {:>6} {:>8} {:>8} {:>8} {:>9}\n", "sequence", "ACE [m]", "steps", "dets",
                       "Pre [%]", "Rec [%]", "F1 [%]", "excluded");
    for (const auto& s : report.sequences) {
      const auto* m = metrics_at(s.metrics, report.reference_d);
      const PrecisionRecall pr = m ? m->pr : PrecisionRecall{};
      out += fmt::format("{:<12} {:>9} {:>6} {:>6} {:>8} {:>8} {:>8} {:>9}\n", s.name, meters(s.ace), s.timesteps,
                         s.detections, pct(pr.precision), pct(pr.recall), pct(pr.f1), s.excluded_detections);
    }
    for (const auto& s : report.sequences) {
      if (s.unmatched_zone_nodes.empty()) continue;
      out += fmt::format("{}: zone nodes never matched at D = {} m: {}\n", s.name, report.reference_d,
                         fmt::join(s.unmatched_zone_nodes, " "));
    }
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_text_file(dir / "report.txt", report_table(report));
}

nlohmann::ordered_json robustness_to_json(const std::vector<RobustnessRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"setting", r.label}, {"fpr", r.fpr}, {"fnr", r.fnr}, {"report", report_to_json(r.report)}});
  }
  return arr;
}

std::string robustness_table(const std::vector<RobustnessRow>& rows) {
  std::string out;
  const double d = rows.empty() ? 5.0 : rows.front().report.reference_d;
  const std::string at = fmt::format("@{}", d);
  out += fmt::format("{:<10} {:>7} {:>7} {:>9} {:>10} {:>10} {:>10}\n", "setting", "r-FPR", "r-FNR", "ACE [m]",
                     "Pre" + at, "Rec" + at, "F1" + at);
  for (const auto& r : rows) {
    const auto* m = r.report.at(r.report.reference_d);
    const PrecisionRecall pr = m ? m->pr : PrecisionRecall{};
    out += fmt::format("{:<10} {:>7.2f} {:>7.2f} {:>9} {:>10} {:>10} {:>10}\n", r.label, 100.0 * r.fpr, 100.0 * r.fnr,
                       meters(r.report.ace), pct(pr.precision), pct(pr.recall), pct(pr.f1));
  }
  return out;
}

void write_manifest(const std::filesystem::path& dir, const std::string& config_text,
                    const std::map<std::string, std::string>& input_digests,
                    const std::vector<std::filesystem::path>& outputs) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config_sha256"] = sha256_hex(config_text);
  j["config"] = config_text;
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : input_digests) j["inputs"][k] = v;
  j["outputs"] = nlohmann::ordered_json::object();
  for (const auto& p : outputs) {
    j["outputs"][std::filesystem::relative(p, dir).generic_string()] = sha256_file(p);
  }
  write_text_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace jloc
