#pragma once

namespace adapt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace adapt
