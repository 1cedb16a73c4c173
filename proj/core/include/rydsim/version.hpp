#pragma once

namespace rydsim {

inline constexpr const char* version_string = "rydsim 0.1.0";

} // namespace rydsim
