#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mgale {

// Shortest decimal that round-trips; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

// FNV-1a, 64 bit; stable across platforms, used for config hashes.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace mgale
