#include "core/couplings.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/basis.hpp"
#include "core/rng.hpp"

namespace loschmidt {

const char* to_string(CouplingKind kind) {
    return kind == CouplingKind::dipolar ? "dipolar" : "double_quantum";
}

CouplingKind coupling_kind_from_string(const std::string& s) {
    if (s == "dipolar") return CouplingKind::dipolar;
    if (s == "double_quantum") return CouplingKind::double_quantum;
    throw std::invalid_argument("unknown coupling kind: " + s);
}

double CouplingMatrix::coupling(int site_i, int site_j) const {
    if (site_i < 1 || site_i > n_spins || site_j < 1 || site_j > n_spins)
        throw std::invalid_argument("CouplingMatrix::coupling: site out of range");
    return value_at(site_i - 1, site_j - 1);
}

CouplingMatrix generate_couplings(int n_spins, double j0, std::uint64_t seed, CouplingKind kind) {
    if (n_spins < 2) throw std::invalid_argument("generate_couplings: n_spins must be >= 2");
    if (n_spins > kMaxSpins) throw std::invalid_argument("generate_couplings: n_spins exceeds limit");
    CouplingMatrix J;
    J.n_spins = n_spins;
    J.j0 = j0;
    J.seed = seed;
    J.kind = kind;
    J.values.assign(std::size_t(n_spins) * n_spins, 0.0);
    SplitMix64 rng(seed);
    const double scale = j0 / std::sqrt(double(n_spins));
    for (int i = 0; i < n_spins; ++i) {
        for (int j = i + 1; j < n_spins; ++j) {
            const double chi = rng.uniform(-0.1, 0.1);
            const double sign = rng.coin() ? -1.0 : 1.0;
            const double v = (1.0 + chi) * sign * scale;
            J.value_at(i, j) = v;
            J.value_at(j, i) = v;
        }
    }
    return J;
}

CouplingMatrix uniform_couplings(int n_spins, double j0, CouplingKind kind) {
    if (n_spins < 2) throw std::invalid_argument("uniform_couplings: n_spins must be >= 2");
    CouplingMatrix J;
    J.n_spins = n_spins;
    J.j0 = j0;
    J.seed = 0;
    J.kind = kind;
    J.values.assign(std::size_t(n_spins) * n_spins, 0.0);
    const double v = j0 / std::sqrt(double(n_spins));
    for (int i = 0; i < n_spins; ++i)
        for (int j = 0; j < n_spins; ++j)
            if (i != j) J.value_at(i, j) = v;
    return J;
}

double local_second_moment(const CouplingMatrix& J, int site) {
    if (site < 1 || site > J.n_spins)
        throw std::invalid_argument("local_second_moment: site out of range");
    double s = 0.0;
    for (int j = 0; j < J.n_spins; ++j) {
        if (j == site - 1) continue;
        const double half = 0.5 * J.value_at(site - 1, j);
        s += half * half;
    }
    return s;
}

double global_second_moment(const CouplingMatrix& J) {
    double s = 0.0;
    for (int i = 1; i <= J.n_spins; ++i) s += local_second_moment(J, i);
    return 0.25 * s;
}

void save_couplings(const CouplingMatrix& J, std::ostream& out) {
    out << "# loschmidt couplings v1\n";
    out << "n_spins = " << J.n_spins << "\n";
    out << "kind = " << to_string(J.kind) << "\n";
    out << "seed = " << J.seed << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", J.j0);
    out << "j0 = " << buf << "\n";
    for (int i = 0; i < J.n_spins; ++i) {
        for (int j = 0; j < J.n_spins; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", J.value_at(i, j));
            out << buf << (j + 1 < J.n_spins ? " " : "\n");
        }
    }
}

void save_couplings(const CouplingMatrix& J, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_couplings: cannot open " + path);
    save_couplings(J, f);
}

namespace {
std::string expect_key(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_couplings: truncated header");
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.substr(0, eq).find(key) == std::string::npos)
        throw std::runtime_error("load_couplings: expected key '" + key + "', got: " + line);
    std::string v = line.substr(eq + 1);
    const auto a = v.find_first_not_of(" \t");
    const auto b = v.find_last_not_of(" \t\r");
    return v.substr(a, b - a + 1);
}
} // namespace

CouplingMatrix load_couplings(std::istream& in) {
    std::string magic;
    if (!std::getline(in, magic) || magic.rfind("# loschmidt couplings", 0) != 0)
        throw std::runtime_error("load_couplings: bad magic line");
    CouplingMatrix J;
    J.n_spins = std::stoi(expect_key(in, "n_spins"));
    J.kind = coupling_kind_from_string(expect_key(in, "kind"));
    J.seed = std::stoull(expect_key(in, "seed"));
    J.j0 = std::stod(expect_key(in, "j0"));
    if (J.n_spins < 2 || J.n_spins > kMaxSpins)
        throw std::runtime_error("load_couplings: n_spins out of range");
    J.values.assign(std::size_t(J.n_spins) * J.n_spins, 0.0);
    for (int i = 0; i < J.n_spins; ++i)
        for (int j = 0; j < J.n_spins; ++j)
            if (!(in >> J.values[std::size_t(i) * J.n_spins + j]))
                throw std::runtime_error("load_couplings: truncated matrix body");
    for (int i = 0; i < J.n_spins; ++i) {
        if (J.value_at(i, i) != 0.0)
            throw std::runtime_error("load_couplings: nonzero diagonal");
        for (int j = 0; j < J.n_spins; ++j)
            if (J.value_at(i, j) != J.value_at(j, i))
                throw std::runtime_error("load_couplings: matrix not symmetric");
    }
    return J;
}

CouplingMatrix load_couplings(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_couplings: cannot open " + path);
    return load_couplings(f);
}

} // namespace loschmidt
