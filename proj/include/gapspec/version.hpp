#pragma once

namespace gapspec {
inline constexpr const char* version = "0.1.0";
}
