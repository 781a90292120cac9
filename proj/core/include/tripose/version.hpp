#pragma once

namespace tripose {

inline constexpr const char* kVersionString = "tripose 0.1.0";

}  // namespace tripose
