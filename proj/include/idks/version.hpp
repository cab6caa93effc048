#pragma once

namespace idks {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace idks
