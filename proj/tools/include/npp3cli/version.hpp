#pragma once

namespace npp3::cli {
inline constexpr const char* kVersion = "0.1.0";
}
