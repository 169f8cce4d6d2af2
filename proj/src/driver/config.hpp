#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/propagator.hpp"

namespace loschmidt {

enum class RunMode { echo, forward, sweep, analyze };

const char* to_string(RunMode mode);

// Parsed sweep configuration. The file format is INI-style: [section]
// headers with key = value lines; lists are whitespace- or comma-separated.
// Every effective value, defaulted or not, is echoed into the run outputs.
struct RunConfig {
    RunMode mode = RunMode::sweep;
    std::vector<int> n_spins;
    double j0 = 1.0;
    std::vector<double> omega1;
    std::vector<double> jdq;

    TimeGrid grid;

    int n_coupling_seeds = 1;
    int n_phase_seeds = 1;
    std::uint64_t base_seed = 1;
    bool reuse_disorder = false;

    PropagatorConfig propagator;

    std::string output_directory = "out";
    bool write_csv = true;
    bool write_json = false;

    void validate() const; // throws with the offending field named
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical key = value echo of every effective setting, used for the
// provenance file. Excludes the output directory, which does not affect
// results.
std::string echo_run_config(const RunConfig& cfg);

} // namespace loschmidt
