#pragma once

namespace faithbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace faithbench
