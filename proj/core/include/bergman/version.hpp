#pragma once

namespace bergman {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bergman
