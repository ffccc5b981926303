#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace codeshot {

// FNV-1a, 64 bit. Used for content hashes in caches and generation logs.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Fixed-width lowercase hex rendering of fnv1a64, for JSON records.
std::string content_hash(std::string_view data);

} // namespace codeshot
