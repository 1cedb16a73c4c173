#pragma once

#include <vector>

#include "rydsim/lattice.hpp"

namespace rydsim {

// Amplitudes over the 2^N spin-configuration basis. Site j (1-based)
// corresponds to bit j-1 (little-endian); a set bit is the Rydberg state.
struct FullState {
    int n_sites;
    cvec amplitudes; // length 2^n_sites
};

// Precomputed interaction diagonal: energies[b] = sum over excited pairs of V_{i,j}.
struct DiagonalInteraction {
    std::vector<double> energies;
};

// Maximum N accepted by build_diagonal and the full-model drivers.
// Default 24; the RYDSIM_MAX_FULL_SITES environment variable overrides it.
int max_full_sites();

DiagonalInteraction build_diagonal(const LatticeParams& p);

// out[b] = (Omega(t)/2) * sum_j in[b ^ (1<<j)] + diag[b] * in[b].
// Matrix-free; writes disjoint output entries (safe to chunk in parallel).
void apply_full_hamiltonian(const FullState& in, double t, const LatticeParams& p,
                            const DriveParams& d, const DiagonalInteraction& diag,
                            FullState& out);

// buffer-level worker behind the FullState overload
void apply_full_hamiltonian(const cvec& in, double t, const LatticeParams& p,
                            const DriveParams& d, const DiagonalInteraction& diag,
                            cvec& out);

// Unit amplitude on the configuration with sites j1..j2 excited.
FullState build_cluster_full(const LatticeParams& p, int j1, int j2);

// All atoms in the ground state.
FullState build_ground_full(const LatticeParams& p);

// <n_j> for j = 1..N.
std::vector<double> rydberg_density_full(const FullState& s);

} // namespace rydsim
