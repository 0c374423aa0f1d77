#pragma once

namespace sam {

inline constexpr const char* kVersion = "samlik 1.0.0";

}
