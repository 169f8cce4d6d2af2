#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/couplings.hpp"
#include "core/state.hpp"

namespace loschmidt {

// Declarative evolution generator: sign * H_dip + zeeman_sign * omega1 * Hz
// (+ H_dq when the perturbation matrix is present). zeeman_omega1 >= 0 at
// this surface; the echo composition flips signs internally.
struct HamiltonianSpec {
    CouplingMatrix dipolar;
    int dipolar_sign = +1;
    double zeeman_omega1 = 0.0;
    std::optional<CouplingMatrix> dq;

    void validate() const;
};

// Parameters of the second-order effective interaction built from the
// double-quantum couplings: pair products J_lk J_ij / (8 omega1).
struct EffectiveSpec {
    CouplingMatrix dq;
    double omega1 = 1.0;

    void validate() const;
};

// phi = sign * H_dip psi with
// H_dip = sum_{i<j} J_ij [2 Sz_i Sz_j - (S+_i S-_j + S-_i S+_j)/2].
// Diagonal part accumulates sum_{i<j} 2 J_ij s_i s_j (s = +-1/2 from bits);
// the flip-flop part couples antiparallel pairs with weight -J_ij/2.
void apply_dipolar(const CouplingMatrix& J, const StateVector& psi, int sign, StateVector& out);
StateVector apply_dipolar(const CouplingMatrix& J, const StateVector& psi, int sign = +1);

// phi_b = omega1 * nu(b) * psi_b.
void apply_zeeman(double omega1, const StateVector& psi, StateVector& out);
StateVector apply_zeeman(double omega1, const StateVector& psi);

// phi = H_dq psi with H_dq = sum_{i<j} J_ij (S+_i S+_j + S-_i S-_j);
// connects nu with nu +- 2 only.
void apply_dq(const CouplingMatrix& Jdq, const StateVector& psi, StateVector& out);
StateVector apply_dq(const CouplingMatrix& Jdq, const StateVector& psi);

// phi = V_eff psi, V_eff = sum over ordered pairs (l,k),(i,j), l!=k, i!=j, of
// J_lk J_ij / (8 omega1) (S+_l S+_k S-_i S-_j + h.c.). Overlapping index sets
// are kept; they produce the effective two-body flip-flops. Conserves nu.
void apply_veff(const EffectiveSpec& spec, const StateVector& psi, StateVector& out);
StateVector apply_veff(const EffectiveSpec& spec, const StateVector& psi);

// Assembled full generator for one HamiltonianSpec. Caches the diagonal
// (Ising + Zeeman) and the pair tables so repeated applications, e.g. inside
// a Krylov loop, stay cheap. zeeman_sign lets the echo build -H0 + Sigma.
class AssembledHamiltonian {
public:
    AssembledHamiltonian(const HamiltonianSpec& spec, int zeeman_sign = +1);

    int n_spins() const { return n_spins_; }
    std::size_t dim() const { return diag_.size(); }
    bool has_dq() const { return !dq_coeff_.empty(); }

    // out = H in; raw pointers so the propagator can reuse buffers.
    void apply(const Complex* in, Complex* out) const;
    void apply(const StateVector& psi, StateVector& out) const;

    // Cheap upper bound on the spectral radius (Gershgorin-style), used to
    // size Krylov substeps.
    double norm_bound() const { return norm_bound_; }

private:
    int n_spins_ = 0;
    std::vector<double> diag_;
    std::vector<std::uint64_t> pair_mask_;
    std::vector<double> flip_coeff_; // -sign*J_ij/2 per unordered pair
    std::vector<double> dq_coeff_;   // J^dq_ij per unordered pair (empty if absent)
    double norm_bound_ = 0.0;
};

StateVector apply_hamiltonian(const HamiltonianSpec& spec, const StateVector& psi);

// Mean over basis states alpha of sum_beta |<beta|V_eff|alpha>|^2, i.e. the
// mean squared row norm. Exact enumeration when feasible, otherwise sampled
// over basis states. Also reports the implied geometric coefficient a from
// <V^2> = |a (J^dq)^2 / (2 omega1)|^2.
struct VeffSecondMoment {
    double moment = 0.0;
    double a_coefficient = 0.0;
    bool exact = true;
    int n_sampled = 0; // 0 when exact
};

VeffSecondMoment veff_second_moment(const EffectiveSpec& spec, int n_samples = 0,
                                    std::uint64_t sample_seed = 1);

// Gamma_eff = 2 pi |a (J^dq)^2 / (2 omega1)|^2 / (b J0) with J0 = 1 in
// internal units. a and b are fit parameters supplied by the caller.
double gamma_eff_estimate(double jdq, double omega1, double a, double b);

} // namespace loschmidt
