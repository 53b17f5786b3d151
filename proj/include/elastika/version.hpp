#pragma once

namespace elastika {

inline constexpr const char* kVersion = "0.1.0";

} // namespace elastika
