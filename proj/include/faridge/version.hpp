#pragma once

namespace faridge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace faridge
