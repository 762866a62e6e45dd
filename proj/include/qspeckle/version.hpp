#pragma once

namespace qspeckle {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qspeckle
