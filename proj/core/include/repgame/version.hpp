#pragma once

namespace repgame {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace repgame
