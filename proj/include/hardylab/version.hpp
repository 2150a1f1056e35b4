#pragma once

namespace hardylab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hardylab
