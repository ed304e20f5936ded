#pragma once

namespace torwalk {
inline constexpr const char* kVersion = "0.1.0";
}
