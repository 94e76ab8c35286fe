#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace botmine {

// Bounded draw with a fixed algorithm so results do not depend on the
// standard library's distribution implementation.
inline uint32_t bounded_uniform(std::mt19937& rng, uint32_t n) {
    return static_cast<uint32_t>((static_cast<uint64_t>(rng()) * n) >> 32);
}

// k distinct indices out of n, partial Fisher-Yates, order of selection kept.
inline std::vector<size_t> sample_indices(std::mt19937& rng, size_t n, size_t k) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + bounded_uniform(rng, static_cast<uint32_t>(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace botmine
