#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace loschmidt {

enum class CouplingKind { dipolar, double_quantum };

const char* to_string(CouplingKind kind);
CouplingKind coupling_kind_from_string(const std::string& s);

// Symmetric all-to-all coupling matrix with zero diagonal. Every unordered
// pair {i,j} carries J_ij = (1+chi) * (-1)^k * j0/sqrt(N) with
// chi ~ U[-0.1,0.1] and k a fair coin, so |J_ij| lies in
// [0.9,1.1]*j0/sqrt(N). Immutable after construction.
struct CouplingMatrix {
    int n_spins = 0;
    double j0 = 1.0;
    std::uint64_t seed = 0;
    CouplingKind kind = CouplingKind::dipolar;
    std::vector<double> values; // row-major N*N, 0-based internally

    // 1-based site indices, matching the rest of the public surface.
    double coupling(int site_i, int site_j) const;
    double& value_at(int i0, int j0_) { return values[std::size_t(i0) * n_spins + j0_]; }
    double value_at(int i0, int j0_) const { return values[std::size_t(i0) * n_spins + j0_]; }
};

// Draw a disorder realization. Deterministic given the seed; the kind is
// metadata only, so dipolar and double-quantum matrices built from the same
// seed share their (chi, k) draws.
CouplingMatrix generate_couplings(int n_spins, double j0, std::uint64_t seed, CouplingKind kind);

// A homogeneous matrix (chi = 0, all signs +). Used by tests and anywhere a
// disorder-free reference is wanted.
CouplingMatrix uniform_couplings(int n_spins, double j0, CouplingKind kind);

// sigma_site^2 = sum_{j != site} (J_sj / 2)^2. Site is 1-based.
double local_second_moment(const CouplingMatrix& J, int site);

// <H^2> = sum_i sigma_i^2 / 4.
double global_second_moment(const CouplingMatrix& J);

// Plain-text round trip: header (n_spins, kind, seed, j0) followed by N*N
// values row-major at full precision.
void save_couplings(const CouplingMatrix& J, std::ostream& out);
void save_couplings(const CouplingMatrix& J, const std::string& path);
CouplingMatrix load_couplings(std::istream& in);
CouplingMatrix load_couplings(const std::string& path);

} // namespace loschmidt
