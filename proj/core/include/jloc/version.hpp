#pragma once

namespace jloc {
inline constexpr const char* kVersion = "0.1.0";
}
