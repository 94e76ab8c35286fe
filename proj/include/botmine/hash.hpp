#pragma once

#include <cstdint>
#include <string>

namespace botmine {

// FNV-1a 64; stable across platforms, used for fixture keys and config hashes.
inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

inline std::string fnv1a64_hex(const std::string& s) { return hex64(fnv1a64(s)); }

}  // namespace botmine
