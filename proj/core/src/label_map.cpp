#include "jloc/label_map.hpp"

#include <fstream>
#include <sstream>

#include "jloc/error.hpp"

namespace jloc {

LabelMap LabelMap::semantic_kitti() {
  LabelMap m;
  const std::pair<ClassId, const char*> table[] = {
      {0, "unlabeled"},       {1, "outlier"},           {10, "car"},
      {11, "bicycle"},        {13, "bus"},              {15, "motorcycle"},
      {16, "on-rails"},       {18, "truck"},            {20, "other-vehicle"},
      {30, "person"},         {31, "bicyclist"},        {32, "motorcyclist"},
      {40, "road"},           {44, "parking"},          {48, "sidewalk"},
      {49, "other-ground"},   {50, "building"},         {51, "fence"},
      {52, "other-structure"}, {60, "lane-marking"},    {70, "vegetation"},
      {71, "trunk"},          {72, "terrain"},          {80, "pole"},
      {81, "traffic-sign"},   {99, "other-object"},     {252, "moving-car"},
      {253, "moving-bicyclist"}, {254, "moving-person"}, {255, "moving-motorcyclist"},
      {256, "moving-on-rails"}, {257, "moving-bus"},    {258, "moving-truck"},
      {259, "moving-other-vehicle"},
  };
  for (const auto& [id, name] : table) m.add(id, name);
  return m;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open label map: " + path.string());
  LabelMap m;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    long id = 0;
    std::string name, extra;
    if (!(ss >> id)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected '<id> <name>'");
    }
    if (!(ss >> name) || (ss >> extra) || id < 0 || id > 0xFFFF) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected '<id> <name>'");
    }
    m.add(static_cast<ClassId>(id), name);
  }
  return m;
}

void LabelMap::add(ClassId id, std::string name) { names_[id] = std::move(name); }

std::optional<ClassId> LabelMap::find(std::string_view name) const {
  for (const auto& [id, n] : names_) {
    if (n == name) return id;
  }
  return std::nullopt;
}

ClassId LabelMap::require(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw ConfigError("label map has no class named '" + std::string(name) + "'");
}

const std::string& LabelMap::name(ClassId id) const {
  auto it = names_.find(id);
  if (it == names_.end()) throw InvariantError("unknown class id " + std::to_string(id));
  return it->second;
}

}  // namespace jloc
