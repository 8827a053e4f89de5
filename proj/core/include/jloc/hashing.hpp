#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace jloc {

/// Lower-case hex SHA-256 digests.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
/// Digest over the contents of several files, in the given order.
std::string sha256_files(std::span<const std::filesystem::path> paths);

}  // namespace jloc
