#include "driver/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "core/trace_io.hpp"

namespace loschmidt {

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::echo: return "echo";
        case RunMode::forward: return "forward";
        case RunMode::sweep: return "sweep";
        case RunMode::analyze: return "analyze";
    }
    return "?";
}

namespace {

RunMode mode_from_string(const std::string& s) {
    if (s == "echo") return RunMode::echo;
    if (s == "forward") return RunMode::forward;
    if (s == "sweep") return RunMode::sweep;
    if (s == "analyze") return RunMode::analyze;
    throw std::invalid_argument("config field 'mode': unknown value '" + s + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config field '" + field + "': not a number: '" + v + "'");
    }
}

long long parse_int(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config field '" + field + "': not an integer: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config field '" + field + "': not an unsigned integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config field '" + field + "': not a boolean: '" + v + "'");
}

template <typename T>
void require_distinct(const std::string& field, const std::vector<T>& xs) {
    std::set<T> seen(xs.begin(), xs.end());
    if (seen.size() != xs.size())
        throw std::invalid_argument("config field '" + field + "': duplicate entries");
}

} // namespace

void RunConfig::validate() const {
    if (n_spins.empty()) throw std::invalid_argument("config field 'n_spins': list is empty");
    for (int n : n_spins) {
        if (n < 2) throw std::invalid_argument("config field 'n_spins': values must be >= 2");
        if (n > kMaxSpins) {
            std::ostringstream msg;
            msg << "config field 'n_spins': " << n << " exceeds the limit " << kMaxSpins
                << " (a single state vector alone would need "
                << (double(sizeof(Complex)) * double(std::uint64_t(1) << n) / (1024.0 * 1024.0 * 1024.0))
                << " GiB; the propagator needs about " << (propagator.max_krylov_dim + 6)
                << "x that)";
            throw std::invalid_argument(msg.str());
        }
    }
    require_distinct("n_spins", n_spins);
    if (!(j0 > 0.0)) throw std::invalid_argument("config field 'j0': must be > 0");
    if (omega1.empty()) throw std::invalid_argument("config field 'omega1': list is empty");
    for (double w : omega1)
        if (w < 0.0) throw std::invalid_argument("config field 'omega1': values must be >= 0");
    require_distinct("omega1", omega1);
    if (jdq.empty()) throw std::invalid_argument("config field 'jdq': list is empty");
    for (double j : jdq)
        if (j < 0.0) throw std::invalid_argument("config field 'jdq': values must be >= 0");
    require_distinct("jdq", jdq);
    try {
        grid.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config section 'grid': ") + e.what());
    }
    if (n_coupling_seeds < 1)
        throw std::invalid_argument("config field 'n_coupling_seeds': must be >= 1");
    if (n_phase_seeds < 1) throw std::invalid_argument("config field 'n_phase_seeds': must be >= 1");
    try {
        propagator.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config section 'propagator': ") + e.what());
    }
    if (propagator.method != PropagationMethod::krylov)
        throw std::invalid_argument("config field 'method': sweeps run with the krylov method");
    if (!write_csv && !write_json)
        throw std::invalid_argument("config field 'formats': at least one of csv, json");
    if (output_directory.empty())
        throw std::invalid_argument("config field 'directory': must not be empty");
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section = "run";
    bool saw_mode = false, saw_nspins = false, saw_omega1 = false, saw_jdq = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << line_no << ": expected key = value, got '" << line << "'";
            throw std::invalid_argument(msg.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qual = section + "." + key;

        if (qual == "run.mode") {
            cfg.mode = mode_from_string(value);
            saw_mode = true;
        } else if (qual == "run.n_spins") {
            cfg.n_spins.clear();
            for (const auto& tok : split_list(value)) cfg.n_spins.push_back(int(parse_int(qual, tok)));
            saw_nspins = true;
        } else if (qual == "run.j0") {
            cfg.j0 = parse_double(qual, value);
        } else if (qual == "run.omega1") {
            cfg.omega1.clear();
            for (const auto& tok : split_list(value)) cfg.omega1.push_back(parse_double(qual, tok));
            saw_omega1 = true;
        } else if (qual == "run.jdq") {
            cfg.jdq.clear();
            for (const auto& tok : split_list(value)) cfg.jdq.push_back(parse_double(qual, tok));
            saw_jdq = true;
        } else if (qual == "grid.t_max") {
            cfg.grid.t_max = parse_double(qual, value);
        } else if (qual == "grid.n_samples") {
            cfg.grid.n_samples = int(parse_int(qual, value));
        } else if (qual == "ensemble.n_coupling_seeds") {
            cfg.n_coupling_seeds = int(parse_int(qual, value));
        } else if (qual == "ensemble.n_phase_seeds") {
            cfg.n_phase_seeds = int(parse_int(qual, value));
        } else if (qual == "ensemble.base_seed") {
            cfg.base_seed = parse_u64(qual, value);
        } else if (qual == "ensemble.reuse_disorder") {
            cfg.reuse_disorder = parse_bool(qual, value);
        } else if (qual == "propagator.max_krylov_dim") {
            cfg.propagator.max_krylov_dim = int(parse_int(qual, value));
        } else if (qual == "propagator.step_tolerance") {
            cfg.propagator.step_tolerance = parse_double(qual, value);
        } else if (qual == "propagator.dt_max") {
            cfg.propagator.dt_max = parse_double(qual, value);
        } else if (qual == "output.directory") {
            cfg.output_directory = value;
        } else if (qual == "output.formats") {
            cfg.write_csv = cfg.write_json = false;
            for (const auto& tok : split_list(value)) {
                if (tok == "csv") cfg.write_csv = true;
                else if (tok == "json") cfg.write_json = true;
                else throw std::invalid_argument("config field 'formats': unknown format '" + tok + "'");
            }
        } else {
            throw std::invalid_argument("config: unknown field '" + qual + "'");
        }
    }
    if (!saw_mode) throw std::invalid_argument("config field 'mode': missing");
    if (cfg.mode != RunMode::analyze) {
        if (!saw_nspins) throw std::invalid_argument("config field 'n_spins': missing");
        if (!saw_omega1) throw std::invalid_argument("config field 'omega1': missing");
        if (!saw_jdq && cfg.mode != RunMode::forward)
            throw std::invalid_argument("config field 'jdq': missing");
        if (!saw_jdq) cfg.jdq = {0.0};
        cfg.validate();
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_run_config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

std::string echo_run_config(const RunConfig& cfg) {
    std::ostringstream out;
    auto list_d = [](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += (i ? " " : "") + format_double(xs[i]);
        return s;
    };
    std::string ns;
    for (std::size_t i = 0; i < cfg.n_spins.size(); ++i)
        ns += (i ? " " : "") + std::to_string(cfg.n_spins[i]);
    out << "mode = " << to_string(cfg.mode) << "\n";
    out << "n_spins = " << ns << "\n";
    out << "j0 = " << format_double(cfg.j0) << "\n";
    out << "omega1 = " << list_d(cfg.omega1) << "\n";
    out << "jdq = " << list_d(cfg.jdq) << "\n";
    out << "t_max = " << format_double(cfg.grid.t_max) << "\n";
    out << "n_samples = " << cfg.grid.n_samples << "\n";
    out << "n_coupling_seeds = " << cfg.n_coupling_seeds << "\n";
    out << "n_phase_seeds = " << cfg.n_phase_seeds << "\n";
    out << "base_seed = " << cfg.base_seed << "\n";
    out << "reuse_disorder = " << (cfg.reuse_disorder ? "true" : "false") << "\n";
    out << "max_krylov_dim = " << cfg.propagator.max_krylov_dim << "\n";
    out << "step_tolerance = " << format_double(cfg.propagator.step_tolerance) << "\n";
    out << "dt_max = " << format_double(cfg.propagator.dt_max) << "\n";
    out << "formats = " << (cfg.write_csv ? std::string("csv") : std::string()) <<
        (cfg.write_csv && cfg.write_json ? " " : "") << (cfg.write_json ? "json" : "") << "\n";
    return out.str();
}

} // namespace loschmidt
