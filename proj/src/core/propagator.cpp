#include "core/propagator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace loschmidt {

void PropagatorConfig::validate() const {
    if (max_krylov_dim < 2) throw std::invalid_argument("PropagatorConfig: max_krylov_dim must be >= 2");
    if (!(step_tolerance > 0.0)) throw std::invalid_argument("PropagatorConfig: step_tolerance must be > 0");
    if (dt_max < 0.0) throw std::invalid_argument("PropagatorConfig: dt_max must be >= 0");
}

void TimeGrid::validate() const {
    if (!(t_max > 0.0)) throw std::invalid_argument("TimeGrid: t_max must be > 0");
    if (n_samples < 2) throw std::invalid_argument("TimeGrid: n_samples must be >= 2");
}

namespace {

HamiltonianSpec strip_dq(HamiltonianSpec spec) {
    spec.dq.reset();
    return spec;
}

HamiltonianSpec strip_zeeman(HamiltonianSpec spec) {
    spec.zeeman_omega1 = 0.0;
    return spec;
}

void apply_zeeman_phases(StateVector& psi, double coeff, double t) {
    if (coeff == 0.0 || t == 0.0) return;
    const int n = psi.n_spins;
    // exp(-i coeff nu(b) t); group by popcount since nu only depends on it.
    std::vector<Complex> phase(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double nu = k - 0.5 * n;
        phase[k] = std::polar(1.0, -coeff * nu * t);
    }
    for (std::size_t b = 0; b < psi.dim(); ++b) psi.amp[b] *= phase[std::popcount(b)];
}

} // namespace

UnitaryEvolver::UnitaryEvolver(const HamiltonianSpec& spec, int zeeman_sign, PropagatorConfig cfg)
    : ham_(spec.dq ? AssembledHamiltonian(spec, zeeman_sign)
                   : AssembledHamiltonian(strip_zeeman(spec), zeeman_sign)),
      cfg_(cfg),
      phase_split_(!spec.dq.has_value()),
      zeeman_coeff_(phase_split_ ? zeeman_sign * spec.zeeman_omega1 : 0.0),
      n_spins_(spec.dipolar.n_spins) {
    cfg_.validate();
    if (cfg_.method == PropagationMethod::dense_oracle && n_spins_ > 10)
        throw std::invalid_argument("UnitaryEvolver: dense method limited to n_spins <= 10");
}

void UnitaryEvolver::evolve_inplace(StateVector& psi, double t) {
    if (psi.n_spins != n_spins_) throw std::invalid_argument("UnitaryEvolver: dimension mismatch");
    if (t < 0.0) throw std::invalid_argument("UnitaryEvolver: negative time");
    if (t > 0.0) {
        if (cfg_.method == PropagationMethod::dense_oracle) {
            dense_evolve(psi, t);
        } else {
            double remaining = t;
            while (remaining > 0.0) krylov_step(psi, remaining);
        }
    }
    apply_zeeman_phases(psi, zeeman_coeff_, t);
}

void UnitaryEvolver::dense_evolve(StateVector& psi, double t) {
    const std::size_t dim = psi.dim();
    if (dense_evecs_.rows() != Eigen::Index(dim)) {
        Eigen::MatrixXcd H(dim, dim);
        StateVector col, unit(n_spins_);
        for (std::size_t b = 0; b < dim; ++b) {
            unit.amp.assign(dim, Complex(0.0, 0.0));
            unit.amp[b] = 1.0;
            ham_.apply(unit, col);
            for (std::size_t r = 0; r < dim; ++r) H(r, b) = col.amp[r];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        dense_evecs_ = es.eigenvectors();
        dense_evals_ = es.eigenvalues();
    }
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(psi.amp.data(), dim);
    Eigen::VectorXcd w = dense_evecs_.adjoint() * v;
    for (Eigen::Index k = 0; k < w.size(); ++k)
        w[k] *= std::polar(1.0, -dense_evals_[k] * t);
    v = dense_evecs_ * w;
    Eigen::Map<Eigen::VectorXcd>(psi.amp.data(), dim) = v;
}

void UnitaryEvolver::krylov_step(StateVector& psi, double& t_remaining) {
    const std::size_t dim = psi.dim();
    const int m_max = int(std::min<std::size_t>(cfg_.max_krylov_dim, dim));
    if (basis_.size() < std::size_t(m_max) + 1)
        basis_.resize(m_max + 1, std::vector<Complex>(dim));
    for (auto& v : basis_)
        if (v.size() != dim) v.assign(dim, Complex(0.0, 0.0));
    work_.resize(dim);
    alpha_.assign(m_max, 0.0);
    beta_.assign(m_max, 0.0);

    const double norm0 = psi.norm();
    if (norm0 == 0.0) throw PropagationError("krylov_step: zero state");
    {
        const double inv = 1.0 / norm0;
        for (std::size_t i = 0; i < dim; ++i) basis_[0][i] = psi.amp[i] * inv;
    }

    const double breakdown_tol = 1e-13 * std::max(1.0, ham_.norm_bound());
    int m = m_max;
    double beta_residual = 0.0;
    for (int k = 0; k < m_max; ++k) {
        ham_.apply(basis_[k].data(), work_.data());
        if (k > 0) {
            const double bk = beta_[k - 1];
            for (std::size_t i = 0; i < dim; ++i) work_[i] -= bk * basis_[k - 1][i];
        }
        Complex ak(0.0, 0.0);
        for (std::size_t i = 0; i < dim; ++i) ak += std::conj(basis_[k][i]) * work_[i];
        alpha_[k] = ak.real();
        for (std::size_t i = 0; i < dim; ++i) work_[i] -= alpha_[k] * basis_[k][i];
        // full reorthogonalization, two passes
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j <= k; ++j) {
                Complex c(0.0, 0.0);
                for (std::size_t i = 0; i < dim; ++i) c += std::conj(basis_[j][i]) * work_[i];
                for (std::size_t i = 0; i < dim; ++i) work_[i] -= c * basis_[j][i];
            }
        }
        double nb = 0.0;
        for (std::size_t i = 0; i < dim; ++i) nb += std::norm(work_[i]);
        nb = std::sqrt(nb);
        beta_[k] = nb;
        if (nb < breakdown_tol) {
            m = k + 1;
            beta_residual = 0.0;
            break;
        }
        if (k + 1 < m_max) {
            const double inv = 1.0 / nb;
            for (std::size_t i = 0; i < dim; ++i) basis_[k + 1][i] = work_[i] * inv;
        } else {
            beta_residual = nb;
        }
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        T(k, k) = alpha_[k];
        if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = beta_[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::MatrixXd& U = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();

    const double dt_cap = cfg_.dt_max > 0.0 ? cfg_.dt_max : t_remaining;
    double dt = std::min(t_remaining, dt_cap);
    if (dt_hint_ > 0.0) dt = std::min(dt, dt_hint_);

    Eigen::VectorXcd y(m);
    const double floor_dt = std::max(t_remaining * 1e-15, 1e-300);
    while (true) {
        for (int k = 0; k < m; ++k) {
            Complex acc(0.0, 0.0);
            for (int q = 0; q < m; ++q)
                acc += U(k, q) * U(0, q) * std::polar(1.0, -lam[q] * dt);
            y[k] = acc;
        }
        const double err = beta_residual * std::abs(y[m - 1]);
        if (err <= cfg_.step_tolerance) break;
        dt *= 0.5;
        if (dt < floor_dt) {
            std::ostringstream msg;
            msg << "Krylov propagation failed to converge: local error " << err
                << " exceeds tolerance " << cfg_.step_tolerance << " at dt " << dt
                << " with subspace dimension " << m << " (increase max_krylov_dim or dt_max)";
            throw PropagationError(msg.str());
        }
    }

    for (std::size_t i = 0; i < dim; ++i) {
        Complex acc(0.0, 0.0);
        for (int k = 0; k < m; ++k) acc += y[k] * basis_[k][i];
        psi.amp[i] = norm0 * acc;
    }
    t_remaining -= dt;
    dt_hint_ = dt * 1.5;
}

StateVector propagate(const HamiltonianSpec& spec, const StateVector& psi, double t,
                      const PropagatorConfig& cfg) {
    spec.validate();
    cfg.validate();
    if (t < 0.0) throw std::invalid_argument("propagate: t must be >= 0");
    if (std::abs(psi.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("propagate: state is not normalized");
    StateVector out = psi;
    UnitaryEvolver ev(spec, +1, cfg);
    ev.evolve_inplace(out, t);
    return out;
}

StateVector loschmidt_apply(const HamiltonianSpec& spec0, double t_r, const StateVector& psi,
                            const PropagatorConfig& cfg) {
    spec0.validate();
    cfg.validate();
    if (spec0.dipolar_sign != +1)
        throw std::invalid_argument("loschmidt_apply: spec0 must carry the forward (+) dipolar sign");
    if (t_r < 0.0) throw std::invalid_argument("loschmidt_apply: t_r must be >= 0");
    if (std::abs(psi.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("loschmidt_apply: state is not normalized");

    StateVector out = psi;
    UnitaryEvolver forward(strip_dq(spec0), +1, cfg);
    forward.evolve_inplace(out, t_r);

    HamiltonianSpec back = spec0;
    back.dipolar_sign = -1;
    UnitaryEvolver backward(back, -1, cfg);
    backward.evolve_inplace(out, t_r);
    return out;
}

} // namespace loschmidt
