#include "core/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace loschmidt {

void HamiltonianSpec::validate() const {
    if (dipolar.n_spins < 2) throw std::invalid_argument("HamiltonianSpec: missing dipolar couplings");
    if (dipolar_sign != 1 && dipolar_sign != -1)
        throw std::invalid_argument("HamiltonianSpec: dipolar sign must be +1 or -1");
    if (zeeman_omega1 < 0.0) throw std::invalid_argument("HamiltonianSpec: omega1 must be >= 0");
    if (dq && dq->n_spins != dipolar.n_spins)
        throw std::invalid_argument("HamiltonianSpec: dq size mismatch");
}

void EffectiveSpec::validate() const {
    if (dq.n_spins < 2) throw std::invalid_argument("EffectiveSpec: missing dq couplings");
    if (!(omega1 > 0.0)) throw std::invalid_argument("EffectiveSpec: omega1 must be > 0");
}

namespace {

void check_dims(const CouplingMatrix& J, const StateVector& psi, const char* who) {
    if (J.n_spins != psi.n_spins || psi.dim() != hilbert_dim(psi.n_spins))
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

} // namespace

void apply_dipolar(const CouplingMatrix& J, const StateVector& psi, int sign, StateVector& out) {
    check_dims(J, psi, "apply_dipolar");
    if (sign != 1 && sign != -1) throw std::invalid_argument("apply_dipolar: sign must be +-1");
    const int n = psi.n_spins;
    out.n_spins = n;
    out.amp.assign(psi.dim(), Complex(0.0, 0.0));
    const double s = double(sign);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double Jij = J.value_at(i, j);
            const double diag = s * 0.5 * Jij;  // 2*J*(+-1/2)(+-1/2)
            const double flip = -s * 0.5 * Jij;
            const BasisIndex mi = BasisIndex(1) << i;
            const BasisIndex mj = BasisIndex(1) << j;
            const BasisIndex mask = mi | mj;
            for (std::size_t b = 0; b < psi.dim(); ++b) {
                const bool bi = b & mi;
                const bool bj = b & mj;
                if (bi == bj) {
                    out.amp[b] += diag * psi.amp[b];
                } else {
                    out.amp[b] += -diag * psi.amp[b] + flip * psi.amp[b ^ mask];
                }
            }
        }
    }
}

StateVector apply_dipolar(const CouplingMatrix& J, const StateVector& psi, int sign) {
    StateVector out;
    apply_dipolar(J, psi, sign, out);
    return out;
}

void apply_zeeman(double omega1, const StateVector& psi, StateVector& out) {
    if (omega1 < 0.0) throw std::invalid_argument("apply_zeeman: omega1 must be >= 0");
    const int n = psi.n_spins;
    out.n_spins = n;
    out.amp.resize(psi.dim());
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        const double nu = std::popcount(b) - 0.5 * n;
        out.amp[b] = omega1 * nu * psi.amp[b];
    }
}

StateVector apply_zeeman(double omega1, const StateVector& psi) {
    StateVector out;
    apply_zeeman(omega1, psi, out);
    return out;
}

void apply_dq(const CouplingMatrix& Jdq, const StateVector& psi, StateVector& out) {
    check_dims(Jdq, psi, "apply_dq");
    const int n = psi.n_spins;
    out.n_spins = n;
    out.amp.assign(psi.dim(), Complex(0.0, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double Jij = Jdq.value_at(i, j);
            const BasisIndex mi = BasisIndex(1) << i;
            const BasisIndex mj = BasisIndex(1) << j;
            const BasisIndex mask = mi | mj;
            for (std::size_t b = 0; b < psi.dim(); ++b) {
                // <b|S+S+|b^mask> needs both bits set in b, <b|S-S-|b^mask>
                // both clear; either way the source is the double flip.
                const bool bi = b & mi;
                const bool bj = b & mj;
                if (bi == bj) out.amp[b] += Jij * psi.amp[b ^ mask];
            }
        }
    }
}

StateVector apply_dq(const CouplingMatrix& Jdq, const StateVector& psi) {
    StateVector out;
    apply_dq(Jdq, psi, out);
    return out;
}

void apply_veff(const EffectiveSpec& spec, const StateVector& psi, StateVector& out) {
    spec.validate();
    check_dims(spec.dq, psi, "apply_veff");
    const int n = psi.n_spins;
    out.n_spins = n;
    out.amp.assign(psi.dim(), Complex(0.0, 0.0));
    // Ordered (l,k) and (i,j) sums fold onto unordered pairs: S+_l S+_k and
    // S-_i S-_j each commute within the pair, so the 4 orderings contribute
    // equally and 4/(8 omega1) = 1/(2 omega1).
    const double pref = 1.0 / (2.0 * spec.omega1);
    const int n_pairs = n * (n - 1) / 2;
    std::vector<BasisIndex> pmask(n_pairs);
    std::vector<double> pj(n_pairs);
    {
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++p) {
                pmask[p] = (BasisIndex(1) << i) | (BasisIndex(1) << j);
                pj[p] = spec.dq.value_at(i, j);
            }
    }
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        const Complex amp = psi.amp[b];
        if (amp == Complex(0.0, 0.0)) continue;
        for (int q = 0; q < n_pairs; ++q) {
            const BasisIndex lower_mask = pmask[q];
            if ((b & lower_mask) != lower_mask) continue; // S-_i S-_j needs both up
            const BasisIndex b1 = b & ~lower_mask;
            for (int p = 0; p < n_pairs; ++p) {
                const BasisIndex raise_mask = pmask[p];
                if ((b1 & raise_mask) != 0) continue; // S+_l S+_k needs both down
                const double c = pref * pj[p] * pj[q];
                out.amp[b1 | raise_mask] += c * amp;
            }
        }
        // Hermitian conjugate: raise (i,j) first, then lower (l,k).
        for (int q = 0; q < n_pairs; ++q) {
            const BasisIndex raise_mask = pmask[q];
            if ((b & raise_mask) != 0) continue;
            const BasisIndex b1 = b | raise_mask;
            for (int p = 0; p < n_pairs; ++p) {
                const BasisIndex lower_mask = pmask[p];
                if ((b1 & lower_mask) != lower_mask) continue;
                const double c = pref * pj[p] * pj[q];
                out.amp[b1 & ~lower_mask] += c * amp;
            }
        }
    }
}

StateVector apply_veff(const EffectiveSpec& spec, const StateVector& psi) {
    StateVector out;
    apply_veff(spec, psi, out);
    return out;
}

AssembledHamiltonian::AssembledHamiltonian(const HamiltonianSpec& spec, int zeeman_sign) {
    spec.validate();
    if (zeeman_sign != 1 && zeeman_sign != -1)
        throw std::invalid_argument("AssembledHamiltonian: zeeman sign must be +-1");
    n_spins_ = spec.dipolar.n_spins;
    const std::size_t dim = hilbert_dim(n_spins_);
    const int n = n_spins_;
    const double s = double(spec.dipolar_sign);
    const double w = zeeman_sign * spec.zeeman_omega1;

    pair_mask_.reserve(std::size_t(n) * (n - 1) / 2);
    flip_coeff_.reserve(pair_mask_.capacity());
    if (spec.dq) dq_coeff_.reserve(pair_mask_.capacity());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            pair_mask_.push_back((BasisIndex(1) << i) | (BasisIndex(1) << j));
            flip_coeff_.push_back(-s * 0.5 * spec.dipolar.value_at(i, j));
            if (spec.dq) dq_coeff_.push_back(spec.dq->value_at(i, j));
        }

    diag_.resize(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        double d = w * (std::popcount(b) - 0.5 * n);
        std::size_t p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++p) {
                const bool same = ((b >> i) & 1ull) == ((b >> j) & 1ull);
                d += (same ? 1.0 : -1.0) * (-flip_coeff_[p]); // s*J/2
            }
        diag_[b] = d;
    }

    double diag_max = 0.0;
    for (double d : diag_) diag_max = std::max(diag_max, std::abs(d));
    double offdiag = 0.0;
    for (std::size_t p = 0; p < pair_mask_.size(); ++p) {
        offdiag += std::abs(flip_coeff_[p]);
        if (!dq_coeff_.empty()) offdiag += std::abs(dq_coeff_[p]);
    }
    norm_bound_ = diag_max + offdiag;
}

void AssembledHamiltonian::apply(const Complex* in, Complex* out) const {
    const std::size_t dim = diag_.size();
    const std::size_t n_pairs = pair_mask_.size();
    const bool dq = !dq_coeff_.empty();
    for (std::size_t b = 0; b < dim; ++b) {
        Complex acc = diag_[b] * in[b];
        for (std::size_t p = 0; p < n_pairs; ++p) {
            const BasisIndex mask = pair_mask_[p];
            const BasisIndex masked = b & mask;
            if (masked != 0 && masked != mask) {
                acc += flip_coeff_[p] * in[b ^ mask]; // antiparallel: flip-flop
            } else if (dq) {
                acc += dq_coeff_[p] * in[b ^ mask]; // parallel: double flip
            }
        }
        out[b] = acc;
    }
}

void AssembledHamiltonian::apply(const StateVector& psi, StateVector& out) const {
    if (psi.n_spins != n_spins_) throw std::invalid_argument("AssembledHamiltonian: dimension mismatch");
    out.n_spins = n_spins_;
    out.amp.resize(dim());
    apply(psi.amp.data(), out.amp.data());
}

StateVector apply_hamiltonian(const HamiltonianSpec& spec, const StateVector& psi) {
    AssembledHamiltonian H(spec);
    StateVector out;
    H.apply(psi, out);
    return out;
}

VeffSecondMoment veff_second_moment(const EffectiveSpec& spec, int n_samples,
                                    std::uint64_t sample_seed) {
    spec.validate();
    const int n = spec.dq.n_spins;
    const std::size_t dim = hilbert_dim(n);

    std::vector<BasisIndex> alphas;
    const bool enumerate = (n_samples <= 0) ? (n <= 10) : false;
    if (enumerate) {
        alphas.resize(dim);
        for (std::size_t b = 0; b < dim; ++b) alphas[b] = b;
    } else {
        const int count = n_samples > 0 ? n_samples : 256;
        SplitMix64 rng(sample_seed);
        alphas.reserve(count);
        for (int k = 0; k < count; ++k) alphas.push_back(rng.next() % dim);
    }

    StateVector col;
    double total = 0.0;
    for (BasisIndex a : alphas) {
        apply_veff(spec, basis_state(n, a), col);
        total += col.norm_sq();
    }
    VeffSecondMoment result;
    result.moment = total / double(alphas.size());
    result.exact = enumerate;
    result.n_sampled = enumerate ? 0 : int(alphas.size());
    const double jdq2 = spec.dq.j0 * spec.dq.j0;
    result.a_coefficient = std::sqrt(result.moment) * 2.0 * spec.omega1 / jdq2;
    return result;
}

double gamma_eff_estimate(double jdq, double omega1, double a, double b) {
    if (!(omega1 > 0.0)) throw std::invalid_argument("gamma_eff_estimate: omega1 must be > 0");
    if (!(b > 0.0)) throw std::invalid_argument("gamma_eff_estimate: b must be > 0");
    const double v = a * jdq * jdq / (2.0 * omega1);
    return 2.0 * M_PI * v * v / b;
}

} // namespace loschmidt
