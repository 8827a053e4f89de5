#include "jloc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "jloc/error.hpp"

namespace jloc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform integer in [0, n) from the engine, without modulo bias. The standard
// distributions are implementation-defined, which would break cross-platform
// reproducibility.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Picks `count` distinct entries of `pool` (partial Fisher-Yates) and relabels them.
void relabel(std::vector<std::size_t>& pool, std::size_t count, ClassId to, std::vector<ClassId>& labels,
             std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
    labels[pool[i]] = to;
  }
}

std::size_t target_count(double rate, std::size_t size) {
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(size)));
}

}  // namespace

void NoiseSpec::validate(const LabelMap& labels) const {
  if (!(fpr >= 0.0 && fpr <= 1.0)) throw ConfigError("noise fpr must lie in [0, 1]");
  if (!(fnr >= 0.0 && fnr <= 1.0)) throw ConfigError("noise fnr must lie in [0, 1]");
  for (ClassId c : confusion_classes) {
    if (!labels.contains(c)) throw ConfigError("confusion class " + std::to_string(c) + " is not in the label map");
  }
}

std::vector<ClassId> default_confusion_classes(const LabelMap& labels) {
  return {labels.require(classes::sidewalk), labels.require(classes::parking), labels.require(classes::other_ground)};
}

std::uint64_t scan_seed(std::uint64_t seed, int timestep) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(timestep)));
}

std::vector<ClassId> corrupt_labels(std::span<const ClassId> labels, const NoiseSpec& spec, int timestep,
                                    ClassId road, ClassId sentinel) {
  std::vector<ClassId> out(labels.begin(), labels.end());
  if (spec.is_identity()) return out;
  std::mt19937_64 rng(scan_seed(spec.seed, timestep));

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == road) pool.push_back(i);
  }
  relabel(pool, target_count(spec.fnr, pool.size()), sentinel, out, rng);

  for (ClassId c : spec.confusion_classes) {
    if (c == road) continue;
    pool.clear();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) pool.push_back(i);
    }
    relabel(pool, target_count(spec.fpr, pool.size()), road, out, rng);
  }
  return out;
}

void NoiseMeter::add(std::span<const ClassId> truth, std::span<const ClassId> predicted, ClassId road,
                     std::span<const ClassId> confusion_classes) {
  if (truth.size() != predicted.size()) throw InputError("label count mismatch between truth and prediction");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == road) {
      ++road_total;
      if (predicted[i] != road) ++road_missed;
    } else if (std::find(confusion_classes.begin(), confusion_classes.end(), truth[i]) != confusion_classes.end()) {
      ++confusion_total;
      if (predicted[i] == road) ++confusion_as_road;
    }
  }
}

}  // namespace jloc
