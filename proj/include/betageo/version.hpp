#pragma once

namespace betageo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace betageo
