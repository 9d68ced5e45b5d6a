#pragma once

namespace vwss {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vwss
