#pragma once

namespace qpm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qpm
