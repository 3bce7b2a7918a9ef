#pragma once

namespace gw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gw
