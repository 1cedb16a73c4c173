#include "rydsim/cluster_model.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "rydsim/special.hpp"

namespace rydsim {

double hopping_coefficient(const DriveParams& d, HoppingConvention conv, double t) {
    const double a = drive_amplitude(d, t);
    return conv == HoppingConvention::paper_verbatim ? a : 0.5 * a;
}

cplx& ClusterState::at(int j1, int j2) {
    return amplitudes[cluster_index(n_sites, j1, j2)];
}

const cplx& ClusterState::at(int j1, int j2) const {
    return amplitudes[cluster_index(n_sites, j1, j2)];
}

SkewPotential build_skew_potential(const LatticeParams& p) {
    SkewPotential u;
    u.values.assign(p.n_sites + 1, 0.0);
    for (int r = 2; r <= p.n_sites; ++r) {
        double s = 0.0;
        for (int l = 1; l <= r - 1; ++l)
            s += (r - l) * p.v0 / std::pow(static_cast<double>(l), p.alpha);
        u.values[r] = s;
    }
    u.gradient_f = resonant_frequency(p);
    return u;
}

double skew_potential(const LatticeParams& p, int r) {
    if (r < 1 || r > p.n_sites - 1)
        throw std::invalid_argument("skew_potential: r out of range [1, N-1]");
    double s = 0.0;
    for (int l = 1; l <= r - 1; ++l)
        s += (r - l) * p.v0 / std::pow(static_cast<double>(l), p.alpha);
    return s;
}

ClusterState make_cluster_state(const LatticeParams& p) {
    ClusterState s;
    s.n_sites = p.n_sites;
    s.amplitudes.assign(cluster_dim(p.n_sites), cplx(0.0, 0.0));
    return s;
}

ClusterState build_cluster_state(const LatticeParams& p, int j1, int j2) {
    if (j1 < 1 || j2 > p.n_sites || j1 > j2)
        throw std::invalid_argument("build_cluster_state: need 1 <= j1 <= j2 <= N");
    ClusterState s = make_cluster_state(p);
    s.at(j1, j2) = cplx(1.0, 0.0);
    return s;
}

ClusterState build_gaussian_cluster(const LatticeParams& p, double c0, double k0,
                                    double sigma, int r0) {
    const int n = p.n_sites;
    if (!(sigma > 0.0))
        throw std::invalid_argument("build_gaussian_cluster: sigma must be > 0");
    if (r0 < 1 || r0 > n - 1)
        throw std::invalid_argument("build_gaussian_cluster: need 1 <= r0 <= N-1");
    // c = j1 + (r0-1)/2 lives on an integer (r0 odd) or half-integer (r0 even)
    // grid; c0 must sit on it.
    const double two_c0 = 2.0 * c0;
    const long long u0 = std::llround(two_c0);
    if (std::fabs(two_c0 - static_cast<double>(u0)) > 1e-9 ||
        ((u0 - (r0 - 1)) % 2 + 2) % 2 != 0)
        throw std::invalid_argument(
            "build_gaussian_cluster: c0 inconsistent with the r0 center-of-mass grid");

    ClusterState s = make_cluster_state(p);
    double sum_w2 = 0.0;
    for (int j1 = 1; j1 <= n - r0 + 1; ++j1) {
        const double c = j1 + 0.5 * (r0 - 1);
        const double w = std::exp(-(c - c0) * (c - c0) / (4.0 * sigma * sigma));
        if (w < 1e-300) continue;
        s.at(j1, j1 + r0 - 1) = w * std::polar(1.0, -k0 * c);
        sum_w2 += w * w;
    }
    if (sum_w2 == 0.0)
        throw std::invalid_argument(
            "build_gaussian_cluster: degenerate packet, all weights below 1e-300");
    const double lambda = 1.0 / std::sqrt(sum_w2);
    for (cplx& a : s.amplitudes) a *= lambda;
    return s;
}

void apply_effective_hamiltonian(const ClusterState& in, double t,
                                 const LatticeParams& p, const DriveParams& d,
                                 HoppingConvention conv, const SkewPotential& u,
                                 ClusterState& out) {
    const int n = p.n_sites;
    if (in.amplitudes.size() != cluster_dim(n) ||
        static_cast<int>(u.values.size()) != n + 1)
        throw std::invalid_argument("apply_effective_hamiltonian: dimension mismatch");
    out.n_sites = n;
    out.amplitudes.resize(in.amplitudes.size());
    const double a = hopping_coefficient(d, conv, t);
    const cplx* src = in.amplitudes.data();
    cplx* dst = out.amplitudes.data();
#pragma omp parallel for schedule(static)
    for (int r = 1; r <= n; ++r) {
        const std::size_t off = cluster_offset(n, r);
        const std::size_t up = r < n ? cluster_offset(n, r + 1) : 0;   // row r+1
        const std::size_t dn = r > 1 ? cluster_offset(n, r - 1) : 0;   // row r-1
        const double diag = u.values[r];
        for (int j1 = 1; j1 <= n - r + 1; ++j1) {
            const std::size_t i = off + (j1 - 1);
            cplx hop(0.0, 0.0);
            // left wall out/in and right wall out/in; moves that would leave
            // 1 <= j1 <= j2 <= N are absent (hard core and ring seam)
            if (r < n) {
                if (j1 > 1) hop += src[up + (j1 - 2)];          // (j1-1, r+1)
                if (j1 + r <= n) hop += src[up + (j1 - 1)];     // (j1,   r+1)
            }
            if (r > 1) {
                hop += src[dn + j1];                            // (j1+1, r-1)
                hop += src[dn + (j1 - 1)];                      // (j1,   r-1)
            }
            dst[i] = diag * src[i] + a * hop;
        }
    }
}

double MomentumBlockState::k() const {
    return 2.0 * M_PI * k_index / n_sites;
}

double MomentumBlockState::cos_half_k() const {
    return cospi(static_cast<double>(k_index) / n_sites);
}

namespace {

// e^{-i pi nu / N} for nu = 0..2N-1; decompose uses table[(m*u) mod 2N].
std::vector<cplx> phase_table(int n) {
    std::vector<cplx> tab(2 * n);
    for (int nu = 0; nu < 2 * n; ++nu)
        tab[nu] = std::polar(1.0, -M_PI * nu / n);
    return tab;
}

} // namespace

std::vector<MomentumBlockState> momentum_decompose(const ClusterState& s) {
    const int n = s.n_sites;
    const auto tab = phase_table(n);
    const double scale = 1.0 / std::sqrt(2.0 * n);
    std::vector<MomentumBlockState> blocks(2 * n);
    for (int m = 0; m < 2 * n; ++m) {
        MomentumBlockState& b = blocks[m];
        b.n_sites = n;
        b.k_index = m;
        b.amplitudes.assign(n - 1, cplx(0.0, 0.0));
        for (int r = 1; r <= n - 1; ++r) {
            const std::size_t off = cluster_offset(n, r);
            cplx acc(0.0, 0.0);
            for (int j1 = 1; j1 <= n - r + 1; ++j1) {
                const std::int64_t u = 2 * j1 + r - 1; // doubled center of mass
                acc += tab[(static_cast<std::int64_t>(m) * u) % (2 * n)] *
                       s.amplitudes[off + (j1 - 1)];
            }
            b.amplitudes[r - 1] = scale * acc;
        }
    }
    return blocks;
}

ClusterState momentum_reassemble(const std::vector<MomentumBlockState>& blocks) {
    if (blocks.empty())
        throw std::invalid_argument("momentum_reassemble: no blocks");
    const int n = blocks.front().n_sites;
    if (static_cast<int>(blocks.size()) != 2 * n)
        throw std::invalid_argument("momentum_reassemble: expected 2N blocks");
    const auto tab = phase_table(n);
    const double scale = 1.0 / std::sqrt(2.0 * n);
    ClusterState s;
    s.n_sites = n;
    s.amplitudes.assign(cluster_dim(n), cplx(0.0, 0.0));
    for (int r = 1; r <= n - 1; ++r) {
        const std::size_t off = cluster_offset(n, r);
        for (int j1 = 1; j1 <= n - r + 1; ++j1) {
            const std::int64_t u = 2 * j1 + r - 1;
            cplx acc(0.0, 0.0);
            for (int m = 0; m < 2 * n; ++m)
                acc += std::conj(tab[(static_cast<std::int64_t>(m) * u) % (2 * n)]) *
                       blocks[m].amplitudes[r - 1];
            s.amplitudes[off + (j1 - 1)] = scale * acc;
        }
    }
    return s;
}

void apply_hk(const MomentumBlockState& in, double t, const LatticeParams& p,
              const DriveParams& d, HoppingConvention conv, const SkewPotential& u,
              MomentumBlockState& out) {
    const int n = p.n_sites;
    const int dim = n - 1;
    if (static_cast<int>(in.amplitudes.size()) != dim)
        throw std::invalid_argument("apply_hk: dimension mismatch");
    out.n_sites = n;
    out.k_index = in.k_index;
    out.amplitudes.resize(dim);
    const double g = 2.0 * hopping_coefficient(d, conv, t) * in.cos_half_k();
    const cplx* src = in.amplitudes.data();
    cplx* dst = out.amplitudes.data();
    for (int r = 1; r <= dim; ++r) {
        cplx acc = u.values[r] * src[r - 1];
        if (r > 1) acc += g * src[r - 2];
        if (r < dim) acc += g * src[r];
        dst[r - 1] = acc;
    }
}

cvec wannier_stark_state(int n_rung, double k, double t, const LatticeParams& p,
                         const DriveParams& d, int r_dim, HoppingConvention conv) {
    const double g = 2.0 * hopping_coefficient(d, conv, t) * std::cos(0.5 * k);
    const double f = resonant_frequency(p);
    const double z = -2.0 * g / f;
    if (n_rung - 3.0 * std::fabs(z) < 2.0)
        throw std::invalid_argument(
            "wannier_stark_state: rung " + std::to_string(n_rung) +
            " too close to the r = 1 edge for |z| = " + std::to_string(std::fabs(z)));
    if (n_rung > r_dim)
        throw std::invalid_argument("wannier_stark_state: rung beyond r_dim");
    cvec amps(r_dim, cplx(0.0, 0.0));
    double norm2 = 0.0;
    for (int r = 1; r <= r_dim; ++r) {
        const double j = bessel_jn(r - n_rung, z);
        if (std::fabs(j) < 1e-14) continue;
        amps[r - 1] = j;
        norm2 += j * j;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx& a : amps) a *= inv;
    return amps;
}

double boundary_occupancy(const ClusterState& s) {
    const int n = s.n_sites;
    double w = 0.0;
    for (int r = 1; r <= n; ++r) {
        const std::size_t off = cluster_offset(n, r);
        w += std::norm(s.amplitudes[off]);                      // j1 = 1
        if (r < n) w += std::norm(s.amplitudes[off + (n - r)]); // j2 = N
    }
    return w;
}

FullState embed_cluster_in_full(const ClusterState& s, const LatticeParams& p) {
    if (s.n_sites != p.n_sites)
        throw std::invalid_argument("embed_cluster_in_full: size mismatch");
    FullState f = build_ground_full(p);
    f.amplitudes[0] = cplx(0.0, 0.0);
    for (int j1 = 1; j1 <= p.n_sites; ++j1)
        for (int j2 = j1; j2 <= p.n_sites; ++j2) {
            std::uint64_t bits = 0;
            for (int j = j1; j <= j2; ++j) bits |= std::uint64_t{1} << (j - 1);
            f.amplitudes[bits] = s.at(j1, j2);
        }
    return f;
}

ClusterState project_full_to_cluster(const FullState& s, const LatticeParams& p) {
    if (s.n_sites != p.n_sites)
        throw std::invalid_argument("project_full_to_cluster: size mismatch");
    ClusterState c = make_cluster_state(p);
    for (int j1 = 1; j1 <= p.n_sites; ++j1)
        for (int j2 = j1; j2 <= p.n_sites; ++j2) {
            std::uint64_t bits = 0;
            for (int j = j1; j <= j2; ++j) bits |= std::uint64_t{1} << (j - 1);
            c.at(j1, j2) = s.amplitudes[bits];
        }
    return c;
}

double cluster_subspace_weight(const FullState& s, const LatticeParams& p) {
    const ClusterState c = project_full_to_cluster(s, p);
    double w = 0.0;
    for (const cplx& a : c.amplitudes) w += std::norm(a);
    return w;
}

} // namespace rydsim
