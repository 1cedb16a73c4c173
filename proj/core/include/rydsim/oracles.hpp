#pragma once

#include <utility>

#include "rydsim/full_model.hpp"
#include "rydsim/lattice.hpp"

namespace rydsim {

// Single driven atom: H(t) = Omega0 cos(w t) sigma^x / 2 + Delta_eff n.
struct TwoLevelParams {
    double omega0;
    double omega;
    double delta_eff = 0.0;
};

// Exact ground -> Rydberg transition probability for Delta_eff = 0:
// sin^2[Omega0 sin(w t) / (2 w)].
double p_ground_to_rydberg(const TwoLevelParams& p, double t);

struct PerturbativeProbability {
    double value;
    bool near_resonance; // Delta_eff == omega: the limiting form Omega0^2 t^2/16
};

// First-order Rydberg -> ground probability in the rotating-wave regime:
// Omega0^2 sin^2[(Delta_eff - w) t / 2] / (4 (Delta_eff - w)^2).
// Requires Omega0 <= Delta_eff / 5 (perturbative domain).
PerturbativeProbability p_rydberg_to_ground(const TwoLevelParams& p, double t);

enum class TwoLevelInitial { ground, rydberg };

// (amp_up, amp_down) at time t. Closed form for Delta_eff = 0; dense 2x2 RK4
// at dt = 1e-5 otherwise.
std::pair<cplx, cplx> exact_two_level_evolution(const TwoLevelParams& p, double t,
                                                TwoLevelInitial initial);

// Dense 2^N x 2^N Hamiltonian at time t, row-major, assembled from explicit
// Pauli operators; the independent reference for the matrix-free path. N <= 6.
cvec assemble_dense_full(const LatticeParams& p, const DriveParams& d, double t);

// Dense-matrix RK4 reference evolution, N <= 6.
FullState brute_force_full_evolve(const LatticeParams& p, const DriveParams& d,
                                  const FullState& psi0, const IntegratorParams& ip);

} // namespace rydsim
