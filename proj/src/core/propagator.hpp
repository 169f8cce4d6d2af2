#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "core/operators.hpp"

namespace loschmidt {

enum class PropagationMethod { krylov, dense_oracle };

struct PropagatorConfig {
    PropagationMethod method = PropagationMethod::krylov;
    int max_krylov_dim = 30;
    double step_tolerance = 1e-9; // local error budget per accepted substep
    double dt_max = 0.0;          // 0 = no explicit substep cap

    void validate() const;
};

// Uniform sample times including t = 0.
struct TimeGrid {
    double t_max = 60.0;
    int n_samples = 200;

    void validate() const;
    double time(int k) const { return t_max * double(k) / double(n_samples - 1); }
};

class PropagationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reusable propagator for one evolution generator. Holds the assembled
// Hamiltonian and the Krylov workspace so a trace can advance the same state
// repeatedly without reallocation.
//
// When the spec has no double-quantum term the Zeeman part commutes with the
// dipolar part and is applied exactly as diagonal phases, leaving only the
// dipolar generator in the Krylov iteration.
class UnitaryEvolver {
public:
    UnitaryEvolver(const HamiltonianSpec& spec, int zeeman_sign, PropagatorConfig cfg);

    // psi <- exp(-i H t) psi. Throws PropagationError when the local error
    // cannot be met within max_krylov_dim at any admissible substep.
    void evolve_inplace(StateVector& psi, double t);

    const AssembledHamiltonian& hamiltonian() const { return ham_; }

private:
    void krylov_step(StateVector& psi, double& t_remaining);
    void dense_evolve(StateVector& psi, double t);

    AssembledHamiltonian ham_;
    PropagatorConfig cfg_;
    bool phase_split_ = false;   // Zeeman handled analytically
    double zeeman_coeff_ = 0.0;  // signed omega1 when phase_split_
    int n_spins_ = 0;
    double dt_hint_ = 0.0;
    // Lanczos workspace
    std::vector<std::vector<Complex>> basis_;
    std::vector<double> alpha_, beta_;
    std::vector<Complex> work_;
    // cached decomposition for the dense method
    Eigen::MatrixXcd dense_evecs_;
    Eigen::VectorXd dense_evals_;
};

// exp(-i H t) psi for a one-shot call; assembles the generator internally.
StateVector propagate(const HamiltonianSpec& spec, const StateVector& psi, double t,
                      const PropagatorConfig& cfg = {});

// U_-(t_R) U_+(t_R) psi with U_+ = exp(-i H0 t_R), H0 = +H_dip + H_Z, and
// U_- = exp(-i (-H_dip - H_Z + H_dq) t_R). spec0 carries the forward
// Hamiltonian; its optional dq matrix is the perturbation entering only the
// backward leg. With dq absent the composition is the identity up to the
// propagator tolerance.
StateVector loschmidt_apply(const HamiltonianSpec& spec0, double t_r, const StateVector& psi,
                            const PropagatorConfig& cfg = {});

} // namespace loschmidt
