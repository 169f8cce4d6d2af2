#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace loschmidt {

// Basis convention, used everywhere: spin sites are numbered 1..N and site i
// maps to bit i-1 of the basis index. Bit set = spin up, bit clear = spin
// down. A state vector over N spins has 2^N amplitudes indexed this way.
using BasisIndex = std::uint64_t;

inline constexpr int kMaxSpins = 24;

inline std::size_t hilbert_dim(int n_spins) {
    return std::size_t(1) << n_spins;
}

inline BasisIndex site_mask(int site) {
    return BasisIndex(1) << (site - 1);
}

inline bool spin_up(BasisIndex b, int site) {
    return (b >> (site - 1)) & 1ull;
}

// Total z-projection nu, a half-integer stored as twice its value so that
// it stays exact. nu = popcount(b) - N/2, giving N+1 distinct values.
struct SpinProjection {
    int twice_nu = 0;

    double value() const { return 0.5 * twice_nu; }

    friend bool operator==(SpinProjection a, SpinProjection b) { return a.twice_nu == b.twice_nu; }
    friend bool operator<(SpinProjection a, SpinProjection b) { return a.twice_nu < b.twice_nu; }
};

inline SpinProjection magnetization(BasisIndex b, int n_spins) {
    if (n_spins < 1 || n_spins > kMaxSpins)
        throw std::invalid_argument("magnetization: n_spins out of range");
    if (b >= hilbert_dim(n_spins))
        throw std::invalid_argument("magnetization: basis index out of range");
    return SpinProjection{2 * std::popcount(b) - n_spins};
}

// All N+1 projections in increasing order; index k corresponds to
// popcount(b) == k, i.e. twice_nu = 2k - N.
inline SpinProjection projection_for_popcount(int k, int n_spins) {
    return SpinProjection{2 * k - n_spins};
}

} // namespace loschmidt
