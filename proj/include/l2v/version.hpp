#pragma once

namespace l2v {

inline constexpr const char* kToolkitName = "l2v";
inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace l2v
