#pragma once

namespace wotkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wotkit
