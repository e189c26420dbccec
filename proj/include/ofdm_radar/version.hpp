#pragma once

#include <string_view>

namespace ofdm_radar {

inline constexpr std::string_view kToolName = "ofdmradar";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace ofdm_radar
