#pragma once

namespace plhom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace plhom
