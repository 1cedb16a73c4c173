#pragma once

#include "rydsim/integrate.hpp"
#include "rydsim/lattice.hpp"

namespace rydsim {

// Amplitudes C_m over Wannier-Stark rungs m = m_min..m_max at fixed momentum.
// delta_omega = omega - F is fixed at construction from the drive; the
// right-hand sides recompute it from (drive, f) so the two cannot disagree.
struct AmplitudeLadder {
    int m_min; // >= 2, away from the hard-core edge
    int m_max;
    double k_over_pi; // momentum in units of pi
    double f;         // Wannier-Stark gradient
    double delta_omega;
    cvec rungs; // index m - m_min

    double cos_half_k() const;
    int dim() const { return m_max - m_min + 1; }
};

AmplitudeLadder make_amplitude_ladder(int m_min, int m_max, double k_over_pi,
                                      const LatticeParams& p, const DriveParams& d);

// Exact rung equation of motion (no approximation beyond the ladder basis):
// dC_m/dt = -(2 Omega0 w / F) cos(k/2) sin(w t) [C_{m-1} e^{iFt} - C_{m+1} e^{-iFt}].
void eom_rhs_full(const AmplitudeLadder& l, const cvec& c, double t,
                  const DriveParams& d, cvec& dcdt);

// Rotating-wave form, valid for |w - F| << F (asserted |dw|/F < 0.1):
// i dC_m/dt = (Omega0 w / F) cos(k/2) [C_{m-1} e^{-i dw t} + C_{m+1} e^{i dw t}].
void eom_rhs_rwa(const AmplitudeLadder& l, const cvec& c, double t,
                 const DriveParams& d, cvec& dcdt);

// Resonant limit dw = 0: uniform tight-binding chain,
// i dC_m/dt = Omega0 cos(k/2) [C_{m-1} + C_{m+1}].
void eom_rhs_resonant(const AmplitudeLadder& l, const cvec& c, double t,
                      const DriveParams& d, cvec& dcdt);

// Near-resonant form with Omega_k = Omega0 w cos(k/2) / F; the phase factors
// carry the full exponent dw*t so the dw -> 0 limit joins the resonant chain
// continuously and the Bloch-like period 2 pi/dw emerges.
void eom_rhs_detuned(const AmplitudeLadder& l, const cvec& c, double t,
                     const DriveParams& d, cvec& dcdt);

enum class LadderVariant { full, rwa, resonant, detuned };

DerivFn ladder_rhs(const AmplitudeLadder& l, const DriveParams& d, LadderVariant v);

// Variance of the rung index m under the population |C_m|^2.
double ladder_variance(const AmplitudeLadder& l, const cvec& rungs);

// Integrates l.rungs in place with the same fixed-step RK4 as everything else;
// norm drift > 1e-4 at a sample point raises NumericalAbort.
void evolve_ladder(AmplitudeLadder& l, const DriveParams& d, LadderVariant v,
                   const IntegratorParams& ip, const Observer& observer = nullptr);

} // namespace rydsim
