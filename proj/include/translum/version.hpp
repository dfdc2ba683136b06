#pragma once

namespace translum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace translum
