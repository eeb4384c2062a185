#pragma once

namespace clusterfeed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clusterfeed
