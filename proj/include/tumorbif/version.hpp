#pragma once

namespace tumorbif {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tumorbif
