#pragma once

namespace subergo {
inline constexpr const char* kVersion = "0.1.0";
}
