#pragma once

namespace taem {
inline constexpr const char* version = "0.1.0";
}
