#pragma once

#include <complex>
#include <vector>

#include "core/basis.hpp"

namespace loschmidt {

using Complex = std::complex<double>;

// Dense amplitude vector over the full 2^N Hilbert space. Value type: safe
// to copy and to hand between worker threads; all observables below are
// pure reads.
struct StateVector {
    int n_spins = 0;
    std::vector<Complex> amp;

    StateVector() = default;
    explicit StateVector(int n) : n_spins(n), amp(hilbert_dim(n), Complex(0.0, 0.0)) {}

    std::size_t dim() const { return amp.size(); }

    double norm_sq() const;
    double norm() const;
    void normalize();
};

// Single-site basis state |b> as a StateVector.
StateVector basis_state(int n_spins, BasisIndex b);

// 2<psi|S^z_site|psi>, in [-1,1]. Sites are 1-based. Rejects states whose
// norm deviates from 1 by more than 1e-6.
double local_polarization(const StateVector& psi, int site);

// Weight per z-projection subspace; entry k holds the total squared
// amplitude on basis states with popcount k (nu = k - N/2). Sums to 1.
std::vector<double> subspace_weights(const StateVector& psi);

Complex inner_product(const StateVector& a, const StateVector& b);

} // namespace loschmidt
