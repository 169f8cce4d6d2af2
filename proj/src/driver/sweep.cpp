#include "driver/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "core/rng.hpp"
#include "core/trace_io.hpp"

namespace fs = std::filesystem;

namespace loschmidt {

std::uint64_t derive_coupling_seed(std::uint64_t base_seed, int n_spins, int c_idx) {
    return mix_seed(base_seed, 0x636F7570ull, std::uint64_t(n_spins), std::uint64_t(c_idx));
}

std::uint64_t derive_dip_seed(std::uint64_t coupling_seed) {
    return mix_seed(coupling_seed, 0x646970ull);
}

std::uint64_t derive_dq_seed(std::uint64_t coupling_seed, bool reuse_disorder) {
    return reuse_disorder ? derive_dip_seed(coupling_seed) : mix_seed(coupling_seed, 0x6471ull);
}

std::uint64_t derive_phase_seed(std::uint64_t base_seed, int n_spins, int p_idx) {
    return mix_seed(base_seed, 0x70687365ull, std::uint64_t(n_spins), std::uint64_t(p_idx));
}

namespace {

constexpr double kTailFraction = 0.25;

std::string opt_to_csv(const std::optional<double>& v) {
    return v ? format_double(*v) : "nan";
}

bool record_less(const SummaryRecord& a, const SummaryRecord& b) {
    if (a.n_spins != b.n_spins) return a.n_spins < b.n_spins;
    if (a.omega1 != b.omega1) return a.omega1 < b.omega1;
    if (a.jdq != b.jdq) return a.jdq < b.jdq;
    if (a.coupling_seed != b.coupling_seed) return a.coupling_seed < b.coupling_seed;
    return a.phase_seed < b.phase_seed;
}

struct SummaryHeader {
    std::string kind;
    std::uint64_t base_seed = 0;
    double j0 = 1.0;
    bool reuse_disorder = false;
    double t_max = 0.0;
    int n_samples = 0;
    int max_krylov_dim = 0;
    double step_tolerance = 0.0;
    double dt_max = 0.0;

    std::string render() const {
        std::ostringstream out;
        out << "# loschmidt summary v1\n";
        out << "# kind=" << kind << "\n";
        out << "# base_seed=" << base_seed << "\n";
        out << "# j0=" << format_double(j0) << "\n";
        out << "# reuse_disorder=" << (reuse_disorder ? "true" : "false") << "\n";
        out << "# t_max=" << format_double(t_max) << "\n";
        out << "# n_samples=" << n_samples << "\n";
        out << "# max_krylov_dim=" << max_krylov_dim << "\n";
        out << "# step_tolerance=" << format_double(step_tolerance) << "\n";
        out << "# dt_max=" << format_double(dt_max) << "\n";
        out << "# tail_fraction=" << format_double(kTailFraction) << "\n";
        return out.str();
    }
};

void write_summary(const std::string& path, const SummaryHeader& header,
                   const std::vector<SummaryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_summary: cannot open " + path);
    out << header.render();
    out << "n_spins,omega1,jdq,sigma_eff,coupling_seed,phase_seed,tau_phi,"
           "plateau_mean,plateau_stderr,decay_model,status\n";
    for (const SummaryRecord& r : records) {
        out << r.n_spins << "," << format_double(r.omega1) << "," << format_double(r.jdq) << ","
            << format_double(r.sigma_eff) << "," << r.coupling_seed << "," << r.phase_seed << ","
            << opt_to_csv(r.tau_phi) << "," << opt_to_csv(r.plateau_mean) << ","
            << opt_to_csv(r.plateau_stderr) << "," << r.decay_model << "," << r.status << "\n";
    }
}

void write_fits(const std::string& path, const std::vector<SummaryRecord>& records) {
    // Rates averaged over realizations per (n_spins, sigma_eff), then split
    // into the weak (fgr) and strong (perturbative) branches.
    std::map<int, std::map<double, std::pair<double, int>>> by_n;
    for (const SummaryRecord& r : records) {
        if (!r.tau_phi || !(*r.tau_phi > 0.0)) continue;
        if (!(r.sigma_eff > 0.0) || !std::isfinite(r.sigma_eff)) continue;
        auto& cell = by_n[r.n_spins][r.sigma_eff];
        cell.first += 1.0 / *r.tau_phi;
        cell.second += 1;
    }
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& [n, cells] : by_n) {
        nlohmann::ordered_json entry;
        entry["n_spins"] = n;
        std::vector<RatePoint> pts;
        for (const auto& [sigma, acc] : cells)
            pts.push_back({sigma, acc.first / double(acc.second)});
        if (pts.size() < 8) {
            entry["status"] = "insufficient-points";
            entry["n_points"] = pts.size();
            doc.push_back(entry);
            continue;
        }
        try {
            const TwoBranchFit fit = fit_two_branches(pts);
            auto dump_fit = [](const RegimeFit& f) {
                nlohmann::ordered_json j;
                j["exponent"] = f.exponent;
                j["offset_rate"] = f.offset_rate;
                j["coefficient"] = f.coefficient;
                j["window"] = {f.window_lo, f.window_hi};
                j["rms_log_residual"] = f.residual;
                j["n_points"] = f.points.size();
                return j;
            };
            entry["status"] = "ok";
            entry["fgr"] = dump_fit(fit.fgr);
            entry["perturbative"] = dump_fit(fit.perturbative);
        } catch (const std::exception& e) {
            entry["status"] = std::string("fit-failed: ") + e.what();
        }
        doc.push_back(entry);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_fits: cannot open " + path);
    out << doc.dump(2) << "\n";
}

std::string trace_filename(int n, double omega1, double jdq, int c_idx, int p_idx, bool csv) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "trace_N%d_w%.12g_j%.12g_r%d-%d.%s", n, omega1, jdq, c_idx,
                  p_idx, csv ? "csv" : "json");
    return buf;
}

double parse_header_double(const LETrace& t, const std::string& key) {
    if (!t.has_param(key))
        throw std::runtime_error("trace provenance missing key '" + key + "'");
    return std::stod(t.param(key));
}

} // namespace

SummaryRecord summarize_trace(const LETrace& trace, double tail_fraction) {
    SummaryRecord rec;
    rec.n_spins = int(parse_header_double(trace, "n_spins"));
    rec.omega1 = parse_header_double(trace, "omega1");
    rec.jdq = parse_header_double(trace, "jdq");
    rec.sigma_eff = trace.sigma_eff();
    rec.coupling_seed = std::stoull(trace.param("coupling_seed"));
    rec.phase_seed = std::stoull(trace.param("phase_seed"));

    if (!trace.complete) {
        rec.status = "failed";
        return rec;
    }
    try {
        const PlateauEstimate p = plateau(trace, tail_fraction);
        rec.plateau_mean = p.mean;
        rec.plateau_stderr = p.stderr_of_mean;
    } catch (const std::exception&) {
        // tail too short; leave the plateau columns empty
    }
    const std::optional<double> tp = tau_phi(trace);
    if (!tp) {
        rec.status = "no-decay";
        return rec;
    }
    rec.tau_phi = *tp;
    try {
        const DecayFit fit = classify_decay(trace, default_fit_window(trace));
        rec.decay_model = to_string(fit.model);
    } catch (const std::exception&) {
        rec.decay_model = "none";
    }
    return rec;
}

SweepResult run(const RunConfig& cfg_in, const RunOptions& opts) {
    RunConfig cfg = cfg_in;
    if (!opts.out_dir_override.empty()) cfg.output_directory = opts.out_dir_override;
    if (opts.seed_override) cfg.base_seed = *opts.seed_override;

    if (cfg.mode == RunMode::analyze)
        return analyze_directory((fs::path(cfg.output_directory) / "traces").string(),
                                 cfg.output_directory);
    cfg.validate();

    const fs::path out_dir(cfg.output_directory);
    const fs::path trace_dir = out_dir / "traces";
    fs::create_directories(trace_dir);

    {
        std::ofstream prov(out_dir / "provenance.txt");
        if (!prov) throw std::runtime_error("run: cannot write provenance file");
        prov << "# loschmidt run provenance v1\n" << echo_run_config(cfg);
    }

    struct Task {
        int n_spins;
        double omega1;
        double jdq;
        int c_idx;
        int p_idx;
    };
    std::vector<Task> tasks;
    for (int n : cfg.n_spins)
        for (double w : cfg.omega1)
            for (double j : cfg.jdq)
                for (int c = 0; c < cfg.n_coupling_seeds; ++c)
                    for (int p = 0; p < cfg.n_phase_seeds; ++p)
                        tasks.push_back({n, w, j, c, p});

    std::vector<SummaryRecord> records(tasks.size());
    std::vector<std::string> trace_paths(tasks.size());
    const bool forward_mode = cfg.mode == RunMode::forward;

    auto run_task = [&](std::size_t idx) {
        const Task& task = tasks[idx];
        const std::uint64_t cseed = derive_coupling_seed(cfg.base_seed, task.n_spins, task.c_idx);
        const std::uint64_t pseed = derive_phase_seed(cfg.base_seed, task.n_spins, task.p_idx);
        SummaryRecord rec;
        rec.n_spins = task.n_spins;
        rec.omega1 = task.omega1;
        rec.jdq = task.jdq;
        rec.sigma_eff = task.jdq == 0.0
                            ? 0.0
                            : (task.omega1 == 0.0 ? std::numeric_limits<double>::infinity()
                                                  : task.jdq * task.jdq / task.omega1);
        rec.coupling_seed = cseed;
        rec.phase_seed = pseed;
        try {
            HamiltonianSpec spec;
            spec.dipolar =
                generate_couplings(task.n_spins, cfg.j0, derive_dip_seed(cseed), CouplingKind::dipolar);
            spec.dipolar_sign = +1;
            spec.zeeman_omega1 = task.omega1;
            if (task.jdq > 0.0)
                spec.dq = generate_couplings(task.n_spins, task.jdq,
                                             derive_dq_seed(cseed, cfg.reuse_disorder),
                                             CouplingKind::double_quantum);
            NeqStateSpec neq{task.n_spins, pseed};
            LETrace trace = forward_mode ? forward_trace(spec, neq, cfg.grid, cfg.propagator)
                                         : echo_trace(spec, neq, cfg.grid, cfg.propagator);
            trace.set_param("base_seed", std::to_string(cfg.base_seed));
            trace.set_param("realization_coupling_seed", std::to_string(cseed));
            trace.set_param("reuse_disorder", cfg.reuse_disorder ? "true" : "false");

            if (cfg.write_csv) {
                const fs::path p = trace_dir / trace_filename(task.n_spins, task.omega1, task.jdq,
                                                              task.c_idx, task.p_idx, true);
                save_trace_csv(trace, p.string());
                trace_paths[idx] = p.string();
            }
            if (cfg.write_json) {
                const fs::path p = trace_dir / trace_filename(task.n_spins, task.omega1, task.jdq,
                                                              task.c_idx, task.p_idx, false);
                save_trace_json(trace, p.string());
                if (trace_paths[idx].empty()) trace_paths[idx] = p.string();
            }
            SummaryRecord analyzed = summarize_trace(trace, kTailFraction);
            analyzed.coupling_seed = cseed; // record the realization-level seed
            rec = analyzed;
        } catch (const std::exception&) {
            rec.status = "failed";
        }
        records[idx] = rec;
    };

    const int workers = std::max(1, opts.workers);
    if (workers == 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int n_threads = int(std::min<std::size_t>(workers, tasks.size()));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    run_task(i);
            });
        for (auto& th : pool) th.join();
    }

    std::sort(records.begin(), records.end(), record_less);

    SummaryHeader header;
    header.kind = forward_mode ? "forward" : "echo";
    header.base_seed = cfg.base_seed;
    header.j0 = cfg.j0;
    header.reuse_disorder = cfg.reuse_disorder;
    header.t_max = cfg.grid.t_max;
    header.n_samples = cfg.grid.n_samples;
    header.max_krylov_dim = cfg.propagator.max_krylov_dim;
    header.step_tolerance = cfg.propagator.step_tolerance;
    header.dt_max = cfg.propagator.dt_max;

    SweepResult result;
    result.records = records;
    result.trace_paths = trace_paths;
    result.summary_path = (out_dir / "summary.csv").string();
    write_summary(result.summary_path, header, records);
    write_fits((out_dir / "fits.json").string(), records);
    if (cfg.n_spins.size() > 1) {
        for (int n : cfg.n_spins) {
            std::vector<SummaryRecord> sub;
            for (const SummaryRecord& r : records)
                if (r.n_spins == n) sub.push_back(r);
            write_summary((out_dir / ("summary_N" + std::to_string(n) + ".csv")).string(), header,
                          sub);
        }
    }
    for (const SummaryRecord& r : records) {
        if (r.status == "failed") ++result.n_failed;
        if (r.status == "no-decay") ++result.n_warnings;
    }
    return result;
}

SweepResult analyze(const std::vector<std::string>& trace_paths, const std::string& out_dir) {
    if (trace_paths.empty()) throw std::invalid_argument("analyze: no trace files given");
    std::vector<LETrace> traces;
    traces.reserve(trace_paths.size());
    for (const std::string& p : trace_paths) {
        LETrace t = p.size() > 5 && p.substr(p.size() - 5) == ".json" ? load_trace_json(p)
                                                                      : load_trace_csv(p);
        for (const char* key :
             {"kind", "n_spins", "omega1", "jdq", "coupling_seed", "phase_seed", "base_seed",
              "realization_coupling_seed", "reuse_disorder", "j0", "t_max", "n_samples",
              "max_krylov_dim", "step_tolerance", "dt_max"})
            if (!t.has_param(key))
                throw std::runtime_error("analyze: " + p + ": provenance missing key '" + key + "'");
        traces.push_back(std::move(t));
    }

    SummaryHeader header;
    header.kind = traces.front().param("kind");
    header.base_seed = std::stoull(traces.front().param("base_seed"));
    header.j0 = parse_header_double(traces.front(), "j0");
    header.reuse_disorder = traces.front().param("reuse_disorder") == "true";
    header.t_max = parse_header_double(traces.front(), "t_max");
    header.n_samples = int(parse_header_double(traces.front(), "n_samples"));
    header.max_krylov_dim = int(parse_header_double(traces.front(), "max_krylov_dim"));
    header.step_tolerance = parse_header_double(traces.front(), "step_tolerance");
    header.dt_max = parse_header_double(traces.front(), "dt_max");
    for (const LETrace& t : traces) {
        if (t.param("kind") != header.kind || std::stoull(t.param("base_seed")) != header.base_seed ||
            parse_header_double(t, "j0") != header.j0 ||
            (t.param("reuse_disorder") == "true") != header.reuse_disorder ||
            parse_header_double(t, "t_max") != header.t_max ||
            int(parse_header_double(t, "n_samples")) != header.n_samples)
            throw std::runtime_error("analyze: traces carry inconsistent provenance");
    }

    std::vector<SummaryRecord> records;
    std::set<int> sizes;
    int n_failed = 0, n_warn = 0;
    for (const LETrace& t : traces) {
        SummaryRecord rec = summarize_trace(t, kTailFraction);
        rec.coupling_seed = std::stoull(t.param("realization_coupling_seed"));
        sizes.insert(rec.n_spins);
        if (rec.status == "failed") ++n_failed;
        if (rec.status == "no-decay") ++n_warn;
        records.push_back(rec);
    }
    std::sort(records.begin(), records.end(), record_less);

    fs::create_directories(out_dir);
    SweepResult result;
    result.records = records;
    result.trace_paths = trace_paths;
    result.summary_path = (fs::path(out_dir) / "summary.csv").string();
    result.n_failed = n_failed;
    result.n_warnings = n_warn;
    write_summary(result.summary_path, header, records);
    write_fits((fs::path(out_dir) / "fits.json").string(), records);
    if (sizes.size() > 1) {
        for (int n : sizes) {
            std::vector<SummaryRecord> sub;
            for (const SummaryRecord& r : records)
                if (r.n_spins == n) sub.push_back(r);
            write_summary((fs::path(out_dir) / ("summary_N" + std::to_string(n) + ".csv")).string(),
                          header, sub);
        }
    }
    return result;
}

SweepResult analyze_directory(const std::string& trace_dir, const std::string& out_dir) {
    if (!fs::is_directory(trace_dir))
        throw std::runtime_error("analyze: not a directory: " + trace_dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(trace_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("trace_", 0) != 0) continue;
        if (entry.path().extension() == ".csv") paths.push_back(entry.path().string());
    }
    if (paths.empty()) {
        for (const auto& entry : fs::directory_iterator(trace_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".json")
                paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    return analyze(paths, out_dir);
}

} // namespace loschmidt
