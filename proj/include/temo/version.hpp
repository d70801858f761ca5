#pragma once

namespace temo {

inline constexpr const char* version = "0.1.0";

} // namespace temo
