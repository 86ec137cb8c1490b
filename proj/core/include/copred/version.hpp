#pragma once

namespace copred {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace copred
