#pragma once

namespace mdshrink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mdshrink
