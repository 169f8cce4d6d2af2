#include "core/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loschmidt {

namespace {
constexpr double kObservableNormTol = 1e-6;

void require_normalized(const StateVector& psi, const char* who) {
    if (std::abs(psi.norm() - 1.0) > kObservableNormTol)
        throw std::invalid_argument(std::string(who) + ": state is not normalized");
}
} // namespace

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const Complex& a : amp) s += std::norm(a);
    return s;
}

double StateVector::norm() const { return std::sqrt(norm_sq()); }

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("StateVector::normalize: zero vector");
    const double inv = 1.0 / n;
    for (Complex& a : amp) a *= inv;
}

StateVector basis_state(int n_spins, BasisIndex b) {
    if (b >= hilbert_dim(n_spins))
        throw std::invalid_argument("basis_state: index out of range");
    StateVector psi(n_spins);
    psi.amp[b] = Complex(1.0, 0.0);
    return psi;
}

double local_polarization(const StateVector& psi, int site) {
    if (site < 1 || site > psi.n_spins)
        throw std::invalid_argument("local_polarization: site out of range");
    require_normalized(psi, "local_polarization");
    const BasisIndex mask = site_mask(site);
    double val = 0.0;
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        const double w = std::norm(psi.amp[b]);
        val += (b & mask) ? w : -w;
    }
    return val;
}

std::vector<double> subspace_weights(const StateVector& psi) {
    require_normalized(psi, "subspace_weights");
    std::vector<double> w(psi.n_spins + 1, 0.0);
    for (std::size_t b = 0; b < psi.dim(); ++b)
        w[std::popcount(b)] += std::norm(psi.amp[b]);
    return w;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.n_spins != b.n_spins)
        throw std::invalid_argument("inner_product: dimension mismatch");
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

} // namespace loschmidt
