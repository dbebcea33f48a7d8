#pragma once

namespace torsim {
inline constexpr const char* version = "0.1.0";
}
