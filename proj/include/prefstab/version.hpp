#pragma once

namespace prefstab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace prefstab
