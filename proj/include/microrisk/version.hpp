#pragma once

#include <string_view>

namespace microrisk {

inline constexpr std::string_view kToolName = "microrisk";
inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace microrisk
