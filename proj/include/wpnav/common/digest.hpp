#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wpnav {

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace wpnav
