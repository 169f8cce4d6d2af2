#pragma once

#include <cstdint>

namespace loschmidt {

// splitmix64: the seed expander used everywhere a stream of raw 64-bit
// words is needed. Chosen over std::mt19937_64 + distributions so that
// generated disorder and phases are identical across standard libraries.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform double in [0,1) with 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform double in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool coin() { return (next() & 1ull) != 0; }
};

// Deterministic combination of seed material. Used by the sweep driver to
// derive per-realization seeds from a base seed; documented in the README.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 rng(a ^ (0x9E3779B97F4A7C15ull + b));
    return rng.next();
}

template <typename... Rest>
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, Rest... rest) {
    return mix_seed(mix_seed(a, b), static_cast<std::uint64_t>(rest)...);
}

} // namespace loschmidt
