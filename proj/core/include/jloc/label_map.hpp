#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace jloc {

using ClassId = std::uint16_t;

/// Class id <-> name table. Defaults to the SemanticKITTI mapping.
class LabelMap {
 public:
  static LabelMap semantic_kitti();
  /// Reads "id name" lines; '#' starts a comment.
  static LabelMap load(const std::filesystem::path& path);

  void add(ClassId id, std::string name);
  std::optional<ClassId> find(std::string_view name) const;
  /// Like find(), but throws ConfigError naming the missing class.
  ClassId require(std::string_view name) const;
  bool contains(ClassId id) const { return names_.count(id) != 0; }
  const std::string& name(ClassId id) const;
  const std::map<ClassId, std::string>& entries() const { return names_; }

 private:
  std::map<ClassId, std::string> names_;
};

namespace classes {
inline constexpr std::string_view road = "road";
inline constexpr std::string_view sidewalk = "sidewalk";
inline constexpr std::string_view parking = "parking";
inline constexpr std::string_view other_ground = "other-ground";
inline constexpr std::string_view unlabeled = "unlabeled";
}  // namespace classes

}  // namespace jloc
