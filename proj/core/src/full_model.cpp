#include "rydsim/full_model.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rydsim/errors.hpp"

namespace rydsim {

int max_full_sites() {
    if (const char* env = std::getenv("RYDSIM_MAX_FULL_SITES")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return cap;
    }
    return 24;
}

namespace {

void check_capacity(int n) {
    const int cap = max_full_sites();
    if (n > cap)
        throw CapacityError("full model: n_sites = " + std::to_string(n) +
                            " exceeds the 2^N capacity guard (" + std::to_string(cap) +
                            " sites; set RYDSIM_MAX_FULL_SITES to change)");
}

} // namespace

DiagonalInteraction build_diagonal(const LatticeParams& p) {
    check_capacity(p.n_sites);
    const int n = p.n_sites;
    const std::uint64_t dim = std::uint64_t{1} << n;
    DiagonalInteraction diag;
    diag.energies.assign(dim, 0.0);
    // energies[b] = energies[b minus lowest bit] + interactions of the lowest
    // excited site with the remaining ones; O(2^N * N) total.
    for (std::uint64_t b = 1; b < dim; ++b) {
        const std::uint64_t low = b & (~b + 1);
        const int i = std::countr_zero(low) + 1;
        std::uint64_t rest = b ^ low;
        double e = diag.energies[rest];
        while (rest) {
            const std::uint64_t nb = rest & (~rest + 1);
            const int j = std::countr_zero(nb) + 1;
            e += interaction_strength(p, i, j);
            rest ^= nb;
        }
        diag.energies[b] = e;
    }
    return diag;
}

void apply_full_hamiltonian(const cvec& in, double t, const LatticeParams& p,
                            const DriveParams& d, const DiagonalInteraction& diag,
                            cvec& out) {
    const int n = p.n_sites;
    const std::int64_t dim = std::int64_t{1} << n;
    if (static_cast<std::int64_t>(in.size()) != dim ||
        static_cast<std::int64_t>(diag.energies.size()) != dim)
        throw std::invalid_argument("apply_full_hamiltonian: dimension mismatch");
    out.resize(dim);
    const double half_drive = 0.5 * drive_amplitude(d, t);
    const cplx* src = in.data();
    cplx* dst = out.data();
    const double* en = diag.energies.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < dim; ++b) {
        cplx acc = en[b] * src[b];
        cplx flip_sum(0.0, 0.0);
        for (int j = 0; j < n; ++j) flip_sum += src[b ^ (std::int64_t{1} << j)];
        dst[b] = acc + half_drive * flip_sum;
    }
}

void apply_full_hamiltonian(const FullState& in, double t, const LatticeParams& p,
                            const DriveParams& d, const DiagonalInteraction& diag,
                            FullState& out) {
    out.n_sites = p.n_sites;
    apply_full_hamiltonian(in.amplitudes, t, p, d, diag, out.amplitudes);
}

FullState build_cluster_full(const LatticeParams& p, int j1, int j2) {
    check_capacity(p.n_sites);
    if (j1 < 1 || j2 > p.n_sites || j1 > j2)
        throw std::invalid_argument("build_cluster_full: need 1 <= j1 <= j2 <= N");
    FullState s;
    s.n_sites = p.n_sites;
    s.amplitudes.assign(std::uint64_t{1} << p.n_sites, cplx(0.0, 0.0));
    std::uint64_t bits = 0;
    for (int j = j1; j <= j2; ++j) bits |= std::uint64_t{1} << (j - 1);
    s.amplitudes[bits] = cplx(1.0, 0.0);
    return s;
}

FullState build_ground_full(const LatticeParams& p) {
    check_capacity(p.n_sites);
    FullState s;
    s.n_sites = p.n_sites;
    s.amplitudes.assign(std::uint64_t{1} << p.n_sites, cplx(0.0, 0.0));
    s.amplitudes[0] = cplx(1.0, 0.0);
    return s;
}

std::vector<double> rydberg_density_full(const FullState& s) {
    const int n = s.n_sites;
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> density(n, 0.0);
    for (std::uint64_t b = 0; b < dim; ++b) {
        const double w = std::norm(s.amplitudes[b]);
        if (w == 0.0) continue;
        std::uint64_t bits = b;
        while (bits) {
            const int j = std::countr_zero(bits);
            density[j] += w;
            bits &= bits - 1;
        }
    }
    return density;
}

} // namespace rydsim
