#pragma once

#include <functional>

#include "rydsim/lattice.hpp"

namespace rydsim {

// dydt = f(y, t); must be linear in y for the Schrodinger-style guarantees.
using DerivFn = std::function<void(const cvec& y, double t, cvec& dydt)>;

// out = H(t) * psi
using ApplyHFn = std::function<void(const cvec& psi, double t, cvec& out)>;

// Called at t = 0, every sample_stride-th step, and at the final step.
using Observer = std::function<void(long step, double t, const cvec& y)>;

// Classic fixed-step four-stage Runge-Kutta on a complex vector ODE.
// The step count is round(t_end/dt); the step size is adjusted to land on
// t_end exactly (identical to dt whenever t_end is a multiple of dt).
void rk4_integrate(const DerivFn& f, cvec& y, const IntegratorParams& ip,
                   const Observer& observer = nullptr);

// Integrate i d|psi>/dt = H(t)|psi> with H supplied as apply_h.
// psi0 is expected normalized; |norm^2 - 1| > 1e-4 at any sample point
// raises NumericalAbort (step too large for the spectral range).
// Returns the final state.
cvec rk4_evolve(const ApplyHFn& apply_h, const cvec& psi0,
                const IntegratorParams& ip, const Observer& observer = nullptr);

double norm_squared(const cvec& v);

} // namespace rydsim
