#pragma once

#include <complex>
#include <vector>

namespace rydsim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

enum class Boundary { periodic, open };

// Chain of N two-level atoms with a power-law interaction V0/d^alpha between
// excited atoms. alpha = 6 (van der Waals) or 3 (dipole-dipole).
struct LatticeParams {
    int n_sites;
    double v0;
    int alpha;
    Boundary boundary;

    LatticeParams(int n_sites, double v0, int alpha = 6,
                  Boundary boundary = Boundary::periodic);
};

// Drive Omega(t) = omega0 * cos(omega * t). Times are measured in units of
// 1/omega0; omega0 = 1 is the canonical unit system. omega0 = 0 (no drive)
// is accepted as a control case.
struct DriveParams {
    double omega0;
    double omega;

    DriveParams(double omega0, double omega);
};

struct IntegratorParams {
    double dt;
    double t_end;
    int sample_stride; // record observables every this many steps

    IntegratorParams(double dt, double t_end, int sample_stride = 1);
};

double drive_amplitude(const DriveParams& d, double t);

// Site distance entering the interaction law: |i-j| on an open chain,
// min(|i-j|, N-|i-j|) (minimal image) on a ring.
int site_distance(const LatticeParams& p, int i, int j);

// V_{i,j} = v0 / d(i,j)^alpha for i != j; i == j is a contract violation.
double interaction_strength(const LatticeParams& p, int i, int j);

// Potential-gradient F(r) = sum_{l=1}^{r-1} v0/l^alpha seen by a wall of a
// cluster of size r, r >= 2.
double resonant_frequency(const LatticeParams& p, int r);

// Asymptotic gradient F = v0 * zeta(alpha), summed until terms fall below 1e-12.
double resonant_frequency(const LatticeParams& p);

} // namespace rydsim
