#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/propagator.hpp"

namespace loschmidt {

// |Psi_neq> = |up_1> (x) sum_r 2^{-(N-1)/2} e^{i phi_r} |xi_r> with phases
// uniform in [0, 2pi), drawn deterministically from phase_seed.
struct NeqStateSpec {
    int n_spins = 2;
    std::uint64_t phase_seed = 0;
};

StateVector build_neq_state(const NeqStateSpec& spec);

enum class TraceKind { echo, forward };

const char* to_string(TraceKind kind);

// Sampled M_11(t) series for one disorder/phase realization, with the full
// provenance needed to regenerate it.
struct LETrace {
    TraceKind kind = TraceKind::echo;
    std::vector<double> times;
    std::vector<double> m11;
    bool complete = true; // false when a propagation failure truncated it

    // canonical key=value provenance block, kept ordered for stable output
    std::vector<std::pair<std::string, std::string>> params;

    double sigma_eff() const; // (J^dq)^2 / omega1, inf at omega1 = 0
    std::string param(const std::string& key) const;
    bool has_param(const std::string& key) const;
    void set_param(const std::string& key, const std::string& value);
};

// M_11(t) = 2 <Psi_neq| U_LE^dag(t) S^z_1 U_LE(t) |Psi_neq> sampled on the
// grid of total times t = 2 t_R. One backward leg per sample; the forward
// leg advances incrementally. On propagation failure the trace is returned
// truncated with complete = false.
LETrace echo_trace(const HamiltonianSpec& spec0, const NeqStateSpec& neq, const TimeGrid& grid,
                   const PropagatorConfig& cfg = {});

// Forward-only polarization 2 <Psi| U_+^dag(t) S^z_1 U_+(t) |Psi>.
LETrace forward_trace(const HamiltonianSpec& spec0, const NeqStateSpec& neq, const TimeGrid& grid,
                      const PropagatorConfig& cfg = {});

// Pointwise mean of traces sharing a grid, used for ensemble averaging.
LETrace mean_trace(const std::vector<LETrace>& traces);

} // namespace loschmidt
