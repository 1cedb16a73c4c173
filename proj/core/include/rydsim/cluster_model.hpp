#pragma once

#include <cstddef>
#include <vector>

#include "rydsim/full_model.hpp"
#include "rydsim/lattice.hpp"

namespace rydsim {

// Coefficient of a single wall move in the effective Hamiltonian.
// paper_verbatim uses Omega(t); projector_derived uses Omega(t)/2, the matrix
// element obtained by projecting the microscopic model onto the cluster
// subspace (each wall move flips exactly one spin). Verbatim is the default
// for figure reproduction; projector_derived is the one that can be compared
// against the full model.
enum class HoppingConvention { paper_verbatim, projector_derived };

double hopping_coefficient(const DriveParams& d, HoppingConvention conv, double t);

// Amplitudes over contiguous clusters (j1, j2), 1 <= j1 <= j2 <= N, stored
// grouped by size r = j2-j1+1. Wrapped intervals are not part of the space.
struct ClusterState {
    int n_sites;
    cvec amplitudes; // length N(N+1)/2

    cplx& at(int j1, int j2);
    const cplx& at(int j1, int j2) const;
};

inline std::size_t cluster_dim(int n) {
    return static_cast<std::size_t>(n) * (n + 1) / 2;
}

// Row-of-fixed-r layout: offset(r) + (j1 - 1).
inline std::size_t cluster_offset(int n, int r) {
    return static_cast<std::size_t>(r - 1) * (n + 1) - static_cast<std::size_t>(r - 1) * r / 2;
}

inline std::size_t cluster_index(int n, int j1, int j2) {
    return cluster_offset(n, j2 - j1 + 1) + (j1 - 1);
}

// U(r) = sum_{l=1}^{r-1} (r-l) V_{0,l} for r = 1..N (values[r]; values[0] unused)
// plus the asymptotic gradient F.
struct SkewPotential {
    std::vector<double> values;
    double gradient_f;
};

SkewPotential build_skew_potential(const LatticeParams& p);

// U(r) for 1 <= r <= N-1 (the sizes reachable by a two-wall block state).
double skew_potential(const LatticeParams& p, int r);

ClusterState make_cluster_state(const LatticeParams& p); // zero-filled
ClusterState build_cluster_state(const LatticeParams& p, int j1, int j2);

// Gaussian wavepacket over clusters of fixed size r0: amplitude on
// (j1, j1+r0-1) proportional to exp(-(c-c0)^2/(4 sigma^2)) exp(-i k0 c),
// c = j1 + (r0-1)/2, normalized by the discrete sum.
ClusterState build_gaussian_cluster(const LatticeParams& p, double c0, double k0,
                                    double sigma, int r0);

// out = H_eff(t) in: each wall moves by one site with the convention's
// coefficient (never producing j1 > j2, never wrapping the ring seam),
// plus the diagonal U(r).
void apply_effective_hamiltonian(const ClusterState& in, double t,
                                 const LatticeParams& p, const DriveParams& d,
                                 HoppingConvention conv, const SkewPotential& u,
                                 ClusterState& out);

// One momentum block: amplitudes over cluster size r = 1..N-1 at fixed
// k = 2 pi k_index / N, k_index = 0..2N-1 (doubled zone; the center of mass
// c lives on a half-integer grid).
struct MomentumBlockState {
    int n_sites;
    int k_index;
    cvec amplitudes; // amplitudes[r-1], r = 1..N-1

    double k() const;
    double cos_half_k() const; // exact zero at k = pi, 3 pi
};

// Isometric change of basis C_k(r) = (2N)^{-1/2} sum_{j1} e^{-i k c} psi(j1, r).
// Covers the two-wall sector r <= N-1; the single fully-extended configuration
// (1, N) is outside the block basis and must carry negligible weight (it is
// part of the monitored seam occupancy).
std::vector<MomentumBlockState> momentum_decompose(const ClusterState& s);

ClusterState momentum_reassemble(const std::vector<MomentumBlockState>& blocks);

// out = H_k(t) in: nearest-neighbor hopping in r with coefficient
// 2 A(t) cos(k/2) (A per convention), open ends at r = 1 and N-1, diagonal U(r).
void apply_hk(const MomentumBlockState& in, double t, const LatticeParams& p,
              const DriveParams& d, HoppingConvention conv, const SkewPotential& u,
              MomentumBlockState& out);

// Wannier-Stark eigenstate of the linear-potential block Hamiltonian:
// amplitudes J_{r-n}(z) over r = 1..r_dim with z = -2 g(t)/F and
// g(t) = 2 A(t) cos(k/2), truncated below 1e-14 and normalized.
// Requires n - 3|z| >= 2 (localization away from the r = 1 edge).
cvec wannier_stark_state(int n_rung, double k, double t, const LatticeParams& p,
                         const DriveParams& d, int r_dim,
                         HoppingConvention conv = HoppingConvention::paper_verbatim);

// Weight on configurations touching the ring seam (j1 = 1 or j2 = N).
double boundary_occupancy(const ClusterState& s);

// Cluster basis states map onto contiguous-block bitstrings of the full model.
FullState embed_cluster_in_full(const ClusterState& s, const LatticeParams& p);
ClusterState project_full_to_cluster(const FullState& s, const LatticeParams& p);
double cluster_subspace_weight(const FullState& s, const LatticeParams& p);

} // namespace rydsim
