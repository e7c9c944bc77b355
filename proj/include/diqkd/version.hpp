#pragma once

namespace diqkd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace diqkd
