#include "jloc/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "jloc/error.hpp"

namespace jloc {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(fmt::format("{}: not a number: '{}'", key, v));
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(fmt::format("{}: not an integer: '{}'", key, v));
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(fmt::format("{}: not an unsigned integer: '{}'", key, v));
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: not a boolean: '{}'", key, v));
}

std::string num(double x) { return fmt::format("{}", x); }
std::string boolean(bool b) { return b ? "true" : "false"; }

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out;
}

struct Key {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <class T>
Key optional_int(std::optional<T> DetectorParams::*field) {
  return {[field](const RunConfig& c) { return (c.detector.*field) ? fmt::format("{}", *(c.detector.*field)) : std::string("auto"); },
          [field](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "auto") c.detector.*field = std::nullopt;
            else if constexpr (std::is_integral_v<T>) c.detector.*field = static_cast<T>(to_int(k, v));
            else c.detector.*field = to_double(k, v);
          }};
}

Key dbl(double DetectorParams::*field) {
  return {[field](const RunConfig& c) { return num(c.detector.*field); },
          [field](RunConfig& c, const std::string& k, const std::string& v) { c.detector.*field = to_double(k, v); }};
}

Key dbl(double RunConfig::*field) {
  return {[field](const RunConfig& c) { return num(c.*field); },
          [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); }};
}

Key flag(bool RunConfig::*field) {
  return {[field](const RunConfig& c) { return boolean(c.*field); },
          [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_bool(k, v); }};
}

Key path(std::filesystem::path RunConfig::*field) {
  return {[field](const RunConfig& c) { return (c.*field).string(); },
          [field](RunConfig& c, const std::string&, const std::string& v) { c.*field = v; }};
}

const std::vector<std::pair<std::string, Key>>& table() {
  static const std::vector<std::pair<std::string, Key>> t = [] {
    std::vector<std::pair<std::string, Key>> k;
    k.emplace_back("delta_p", dbl(&DetectorParams::delta_p));
    k.emplace_back("delta_a_deg", dbl(&RunConfig::delta_a_deg));
    k.emplace_back("n", Key{[](const RunConfig& c) { return fmt::format("{}", c.detector.n); },
                            [](RunConfig& c, const std::string& key, const std::string& v) {
                              c.detector.n = static_cast<int>(to_int(key, v));
                            }});
    k.emplace_back("roi_size", dbl(&DetectorParams::roi_size));
    k.emplace_back("resolution", dbl(&DetectorParams::resolution));
    k.emplace_back("min_points", Key{[](const RunConfig& c) { return fmt::format("{}", c.detector.min_points); },
                                     [](RunConfig& c, const std::string& key, const std::string& v) {
                                       c.detector.min_points = static_cast<int>(to_int(key, v));
                                     }});
    k.emplace_back("inner_radius", dbl(&DetectorParams::inner_radius));
    k.emplace_back("outer_radius", dbl(&DetectorParams::outer_radius));
    k.emplace_back("close_radius_px", optional_int(&DetectorParams::close_radius_px));
    k.emplace_back("open_radius_px", optional_int(&DetectorParams::open_radius_px));
    k.emplace_back("spur_length", dbl(&DetectorParams::spur_length));
    k.emplace_back("harris_k", dbl(&DetectorParams::harris_k));
    k.emplace_back("harris_sigma", dbl(&DetectorParams::harris_sigma));
    k.emplace_back("harris_derivative_sigma", dbl(&DetectorParams::harris_derivative_sigma));
    k.emplace_back("harris_rel_threshold", dbl(&DetectorParams::harris_rel_threshold));
    k.emplace_back("nms_radius_px", optional_int(&DetectorParams::nms_radius_px));
    k.emplace_back("subpixel", Key{[](const RunConfig& c) { return boolean(c.detector.subpixel); },
                                   [](RunConfig& c, const std::string& key, const std::string& v) {
                                     c.detector.subpixel = to_bool(key, v);
                                   }});
    k.emplace_back("causal", Key{[](const RunConfig& c) { return boolean(c.detector.causal); },
                                 [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.detector.causal = to_bool(key, v);
                                 }});
    k.emplace_back("max_annulus_outside", dbl(&DetectorParams::max_annulus_outside));

    k.emplace_back("thresholds", Key{[](const RunConfig& c) { return join<double>(c.thresholds, num); },
                                     [](RunConfig& c, const std::string& key, const std::string& v) {
                                       c.thresholds.clear();
                                       for (const auto& s : split(v, ',')) c.thresholds.push_back(to_double(key, s));
                                     }});
    k.emplace_back("reference_d", dbl(&RunConfig::reference_d));
    k.emplace_back("ace_tp_only", flag(&RunConfig::ace_tp_only));

    k.emplace_back("fpr", dbl(&RunConfig::fpr));
    k.emplace_back("fnr", dbl(&RunConfig::fnr));
    k.emplace_back("seed", Key{[](const RunConfig& c) { return fmt::format("{}", c.seed); },
                               [](RunConfig& c, const std::string& key, const std::string& v) { c.seed = to_u64(key, v); }});
    k.emplace_back("confusion_classes",
                   Key{[](const RunConfig& c) { return join<std::string>(c.confusion_classes, [](const std::string& s) { return s; }); },
                       [](RunConfig& c, const std::string&, const std::string& v) { c.confusion_classes = split(v, ','); }});
    k.emplace_back("robustness_grid",
                   Key{[](const RunConfig& c) {
                         return join<std::pair<double, double>>(c.robustness_grid, [](const std::pair<double, double>& p) {
                           return fmt::format("{}/{}", p.first, p.second);
                         });
                       },
                       [](RunConfig& c, const std::string& key, const std::string& v) {
                         c.robustness_grid.clear();
                         for (const auto& cell : split(v, ',')) {
                           const auto parts = split(cell, '/');
                           if (parts.size() != 2) throw ConfigError(fmt::format("{}: expected fpr/fnr, got '{}'", key, cell));
                           c.robustness_grid.emplace_back(to_double(key, parts[0]), to_double(key, parts[1]));
                         }
                       }});

    k.emplace_back("sequences",
                   Key{[](const RunConfig& c) {
                         return join<std::filesystem::path>(c.sequences, [](const std::filesystem::path& p) { return p.string(); });
                       },
                       [](RunConfig& c, const std::string&, const std::string& v) {
                         c.sequences.clear();
                         for (const auto& s : split(v, ',')) c.sequences.emplace_back(s);
                       }});
    k.emplace_back("label_map", path(&RunConfig::label_map));
    k.emplace_back("road_graph", path(&RunConfig::road_graph));
    k.emplace_back("output_dir", path(&RunConfig::output_dir));
    k.emplace_back("road_class", Key{[](const RunConfig& c) { return c.road_class; },
                                     [](RunConfig& c, const std::string&, const std::string& v) { c.road_class = v; }});
    k.emplace_back("sentinel_class", Key{[](const RunConfig& c) { return c.sentinel_class; },
                                         [](RunConfig& c, const std::string&, const std::string& v) { c.sentinel_class = v; }});
    k.emplace_back("calibration",
                   Key{[](const RunConfig& c) {
                         return join<double>(std::vector<double>(c.calibration.begin(), c.calibration.end()), num);
                       },
                       [](RunConfig& c, const std::string& key, const std::string& v) {
                         const auto parts = split(v, ',');
                         if (parts.size() != 12) throw ConfigError(fmt::format("{}: expected 12 numbers, got {}", key, parts.size()));
                         for (std::size_t i = 0; i < 12; ++i) c.calibration[i] = to_double(key, parts[i]);
                       }});
    k.emplace_back("projection_origin",
                   Key{[](const RunConfig& c) {
                         return c.projection_origin ? fmt::format("{}, {}", c.projection_origin->lat, c.projection_origin->lon)
                                                    : std::string("none");
                       },
                       [](RunConfig& c, const std::string& key, const std::string& v) {
                         if (v == "none") {
                           c.projection_origin.reset();
                           return;
                         }
                         const auto parts = split(v, ',');
                         if (parts.size() != 2) throw ConfigError(fmt::format("{}: expected 'lat, lon' or 'none'", key));
                         c.projection_origin = GeodeticPoint{to_double(key, parts[0]), to_double(key, parts[1])};
                       }});
    k.emplace_back("debug_images", flag(&RunConfig::debug_images));
    k.emplace_back("write_noisy_labels", flag(&RunConfig::write_noisy_labels));
    k.emplace_back("threads", Key{[](const RunConfig& c) { return fmt::format("{}", c.threads); },
                                  [](RunConfig& c, const std::string& key, const std::string& v) {
                                    c.threads = static_cast<int>(to_int(key, v));
                                  }});
    return k;
  }();
  return t;
}

void parse_into(RunConfig& cfg, const std::string& text, const std::filesystem::path& base_dir, int depth) {
  if (depth > 16) throw ConfigError("include depth exceeds 16 (cycle?)");
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("include", 0) == 0 && line.size() > 7 && (line[7] == ' ' || line[7] == '\t')) {
      const std::filesystem::path inc = base_dir / trim(line.substr(8));
      std::ifstream f(inc);
      if (!f) throw ConfigError(fmt::format("line {}: cannot open include '{}'", lineno, inc.string()));
      std::stringstream ss;
      ss << f.rdbuf();
      parse_into(cfg, ss.str(), inc.parent_path(), depth + 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
}

}  // namespace

DetectorParams RunConfig::detector_params() const {
  DetectorParams p = detector;
  p.delta_a = deg2rad(delta_a_deg);
  return p;
}

EvalSettings RunConfig::eval_settings() const {
  EvalSettings s;
  s.thresholds = thresholds;
  s.reference_d = reference_d;
  s.roi_size = detector.roi_size;
  s.outer_radius = detector.outer_radius;
  s.ace_tp_only = ace_tp_only;
  return s;
}

LabelMap RunConfig::labels() const { return label_map.empty() ? LabelMap::semantic_kitti() : LabelMap::load(label_map); }

NoiseSpec RunConfig::noise(const LabelMap& labels) const {
  NoiseSpec n;
  n.fpr = fpr;
  n.fnr = fnr;
  n.seed = seed;
  for (const auto& name : confusion_classes) n.confusion_classes.push_back(labels.require(name));
  n.validate(labels);
  return n;
}

Pose3 RunConfig::calibration_pose() const {
  Pose3 p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = calibration[r * 4 + c];
    p.translation[r] = calibration[r * 4 + 3];
  }
  if (!is_rotation(p.rotation, 1e-6)) throw ConfigError("calibration: rotation block is not orthonormal");
  p.rotation = orthonormalize(p.rotation);
  return p;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& [name, k] : table()) {
    if (name == key) {
      k.set(*this, key, value);
      return;
    }
  }
  throw ConfigError(fmt::format("unknown config key '{}'", key));
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, k] : table()) v.push_back(name);
    return v;
  }();
  return names;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [name, k] : table()) out += fmt::format("{} = {}\n", name, k.get(*this));
  return out;
}

void RunConfig::validate() const {
  detector_params().validate();
  if (thresholds.empty()) throw ConfigError("thresholds: at least one D value is required");
  for (double d : thresholds) {
    if (!(d > 0.0)) throw ConfigError(fmt::format("thresholds: D must be positive, got {}", d));
  }
  if (!(reference_d > 0.0)) throw ConfigError("reference_d must be positive");
  for (double r : {fpr, fnr}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("fpr and fnr must lie in [0, 1]");
  }
  for (const auto& [a, b] : robustness_grid) {
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) throw ConfigError("robustness_grid rates must lie in [0, 1]");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
  calibration_pose();
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir, RunConfig base) {
  parse_into(base, text, base_dir, 0);
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path.parent_path().empty() ? "." : path.parent_path(), std::move(base));
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* dir = std::getenv("JLOC_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
}

}  // namespace jloc
