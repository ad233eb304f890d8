#pragma once

// Seeded randomness helpers. std::<distribution> output is implementation
// defined, so every draw the library makes goes through these functions to
// keep outputs byte-identical across platforms and standard libraries.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ares::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent substream for (seed, index); worker count never changes results.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642FULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return std::mt19937_64(a ^ (b << 1));
}

inline std::mt19937_64 stream(std::uint64_t seed) { return substream(seed, 0); }

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Exactly one generator call per draw so streams stay aligned for p in {0,1}.
inline bool bernoulli(std::mt19937_64& g, double p) {
    return uniform01(g) < p;
}

// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
    if (n <= 1) {
        return 0;
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = g();
    while (r >= limit) {
        r = g();
    }
    return r % n;
}

// Fisher-Yates; std::shuffle is implementation defined.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& g) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(below(g, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace ares::rng
