#include "core/echo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "core/rng.hpp"

namespace loschmidt {

StateVector build_neq_state(const NeqStateSpec& spec) {
    if (spec.n_spins < 2 || spec.n_spins > kMaxSpins)
        throw std::invalid_argument("build_neq_state: n_spins out of range");
    StateVector psi(spec.n_spins);
    const std::size_t rest = hilbert_dim(spec.n_spins - 1);
    const double mag = 1.0 / std::sqrt(double(rest));
    SplitMix64 rng(spec.phase_seed);
    for (std::size_t r = 0; r < rest; ++r) {
        const double phi = rng.uniform() * 2.0 * M_PI;
        // site 1 is bit 0; the remaining spins form the index r on bits 1..N-1
        psi.amp[(r << 1) | 1ull] = std::polar(mag, phi);
    }
    return psi;
}

const char* to_string(TraceKind kind) { return kind == TraceKind::echo ? "echo" : "forward"; }

double LETrace::sigma_eff() const {
    const double jdq = has_param("jdq") ? std::stod(param("jdq")) : 0.0;
    const double omega1 = has_param("omega1") ? std::stod(param("omega1")) : 0.0;
    if (jdq == 0.0) return 0.0;
    if (omega1 == 0.0) return std::numeric_limits<double>::infinity();
    return jdq * jdq / omega1;
}

std::string LETrace::param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw std::out_of_range("LETrace: missing parameter " + key);
}

bool LETrace::has_param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return true;
    return false;
}

void LETrace::set_param(const std::string& key, const std::string& value) {
    for (auto& [k, v] : params)
        if (k == key) {
            v = value;
            return;
        }
    params.emplace_back(key, value);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void fill_params(LETrace& trace, const HamiltonianSpec& spec0, const NeqStateSpec& neq,
                 const TimeGrid& grid, const PropagatorConfig& cfg) {
    trace.set_param("format", "loschmidt-trace-v1");
    trace.set_param("kind", to_string(trace.kind));
    trace.set_param("n_spins", std::to_string(spec0.dipolar.n_spins));
    trace.set_param("j0", fmt_double(spec0.dipolar.j0));
    trace.set_param("omega1", fmt_double(spec0.zeeman_omega1));
    trace.set_param("jdq", fmt_double(spec0.dq ? spec0.dq->j0 : 0.0));
    trace.set_param("sigma_eff", fmt_double([&] {
        if (!spec0.dq || spec0.dq->j0 == 0.0) return 0.0;
        if (spec0.zeeman_omega1 == 0.0) return std::numeric_limits<double>::infinity();
        return spec0.dq->j0 * spec0.dq->j0 / spec0.zeeman_omega1;
    }()));
    trace.set_param("coupling_seed", std::to_string(spec0.dipolar.seed));
    trace.set_param("dq_seed", spec0.dq ? std::to_string(spec0.dq->seed) : "none");
    trace.set_param("phase_seed", std::to_string(neq.phase_seed));
    trace.set_param("t_max", fmt_double(grid.t_max));
    trace.set_param("n_samples", std::to_string(grid.n_samples));
    trace.set_param("max_krylov_dim", std::to_string(cfg.max_krylov_dim));
    trace.set_param("step_tolerance", fmt_double(cfg.step_tolerance));
    trace.set_param("dt_max", fmt_double(cfg.dt_max));
    trace.set_param("status", "ok");
}

} // namespace

LETrace echo_trace(const HamiltonianSpec& spec0, const NeqStateSpec& neq, const TimeGrid& grid,
                   const PropagatorConfig& cfg) {
    spec0.validate();
    grid.validate();
    cfg.validate();
    if (spec0.dipolar_sign != +1)
        throw std::invalid_argument("echo_trace: spec0 must carry the forward (+) dipolar sign");
    if (neq.n_spins != spec0.dipolar.n_spins)
        throw std::invalid_argument("echo_trace: n_spins mismatch");

    LETrace trace;
    trace.kind = TraceKind::echo;
    fill_params(trace, spec0, neq, grid, cfg);

    HamiltonianSpec fwd = spec0;
    fwd.dq.reset();
    UnitaryEvolver forward(fwd, +1, cfg);

    HamiltonianSpec back = spec0;
    back.dipolar_sign = -1;
    UnitaryEvolver backward(back, -1, cfg);

    StateVector psi_fwd = build_neq_state(neq);
    double t_fwd = 0.0;
    try {
        for (int k = 0; k < grid.n_samples; ++k) {
            const double t = grid.time(k);
            const double t_r = 0.5 * t;
            forward.evolve_inplace(psi_fwd, t_r - t_fwd);
            t_fwd = t_r;
            StateVector echoed = psi_fwd;
            backward.evolve_inplace(echoed, t_r);
            trace.times.push_back(t);
            trace.m11.push_back(local_polarization(echoed, 1));
        }
    } catch (const PropagationError&) {
        trace.complete = false;
        trace.set_param("status", "partial");
    }
    return trace;
}

LETrace forward_trace(const HamiltonianSpec& spec0, const NeqStateSpec& neq, const TimeGrid& grid,
                      const PropagatorConfig& cfg) {
    spec0.validate();
    grid.validate();
    cfg.validate();
    if (spec0.dipolar_sign != +1)
        throw std::invalid_argument("forward_trace: spec0 must carry the forward (+) dipolar sign");
    if (neq.n_spins != spec0.dipolar.n_spins)
        throw std::invalid_argument("forward_trace: n_spins mismatch");

    LETrace trace;
    trace.kind = TraceKind::forward;
    fill_params(trace, spec0, neq, grid, cfg);

    HamiltonianSpec fwd = spec0;
    fwd.dq.reset();
    UnitaryEvolver forward(fwd, +1, cfg);

    StateVector psi = build_neq_state(neq);
    double t_cur = 0.0;
    try {
        for (int k = 0; k < grid.n_samples; ++k) {
            const double t = grid.time(k);
            forward.evolve_inplace(psi, t - t_cur);
            t_cur = t;
            trace.times.push_back(t);
            trace.m11.push_back(local_polarization(psi, 1));
        }
    } catch (const PropagationError&) {
        trace.complete = false;
        trace.set_param("status", "partial");
    }
    return trace;
}

LETrace mean_trace(const std::vector<LETrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("mean_trace: no traces");
    LETrace out = traces.front();
    for (std::size_t i = 1; i < traces.size(); ++i) {
        const LETrace& t = traces[i];
        if (t.times.size() != out.times.size())
            throw std::invalid_argument("mean_trace: grids differ");
        for (std::size_t k = 0; k < out.m11.size(); ++k) out.m11[k] += t.m11[k];
        out.complete = out.complete && t.complete;
    }
    const double inv = 1.0 / double(traces.size());
    for (double& v : out.m11) v *= inv;
    out.set_param("ensemble_size", std::to_string(traces.size()));
    return out;
}

} // namespace loschmidt
