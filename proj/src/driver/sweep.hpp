#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "driver/config.hpp"

namespace loschmidt {

// Seed bookkeeping. Realization seeds derive deterministically from the
// base seed, the cluster size and the realization counters, so that a
// summary row is reproducible from its own columns:
//   coupling_seed = mix(base_seed, 'coup', n_spins, c_idx)
//   dip_seed      = mix(coupling_seed, 'dip')
//   dq_seed       = reuse_disorder ? dip_seed : mix(coupling_seed, 'dq')
//   phase_seed    = mix(base_seed, 'phse', n_spins, p_idx)
std::uint64_t derive_coupling_seed(std::uint64_t base_seed, int n_spins, int c_idx);
std::uint64_t derive_dip_seed(std::uint64_t coupling_seed);
std::uint64_t derive_dq_seed(std::uint64_t coupling_seed, bool reuse_disorder);
std::uint64_t derive_phase_seed(std::uint64_t base_seed, int n_spins, int p_idx);

struct SummaryRecord {
    int n_spins = 0;
    double omega1 = 0.0;
    double jdq = 0.0;
    double sigma_eff = 0.0;
    std::uint64_t coupling_seed = 0;
    std::uint64_t phase_seed = 0;
    std::optional<double> tau_phi;
    std::optional<double> plateau_mean;
    std::optional<double> plateau_stderr;
    std::string decay_model = "none";
    std::string status = "ok"; // ok | no-decay | failed
};

struct SweepResult {
    std::vector<SummaryRecord> records;
    std::string summary_path;
    std::vector<std::string> trace_paths;
    int n_failed = 0;
    int n_warnings = 0;
};

struct RunOptions {
    std::string out_dir_override;             // empty: use config value
    int workers = 1;
    std::optional<std::uint64_t> seed_override;
};

// Executes every (n_spins, omega1, jdq) x realization task, writes one trace
// file per realization plus summary.csv (and fits.json when a branch fit is
// possible), and returns the records. Failed points are recorded, never
// dropped.
SweepResult run(const RunConfig& cfg, const RunOptions& opts = {});

// Re-analyzes stored traces without re-simulation; writes the same
// summary.csv a run over those parameters would have produced. Refuses
// traces with missing or mutually inconsistent provenance.
SweepResult analyze(const std::vector<std::string>& trace_paths, const std::string& out_dir);
SweepResult analyze_directory(const std::string& trace_dir, const std::string& out_dir);

// Row-level analysis shared by run and analyze.
SummaryRecord summarize_trace(const LETrace& trace, double tail_fraction = 0.25);

} // namespace loschmidt
