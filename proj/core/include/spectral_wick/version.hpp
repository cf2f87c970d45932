#pragma once

namespace spectral_wick {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spectral_wick
