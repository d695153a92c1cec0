#pragma once

namespace e91fss {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace e91fss
