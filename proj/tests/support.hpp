#pragma once

// Shared helpers for the test suites. The reference computations here are
// deliberately independent of the library's own evaluation paths.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rydsim/integrate.hpp"
#include "rydsim/lattice.hpp"

namespace testsup {

using rydsim::cplx;
using rydsim::cvec;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline cvec random_state(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> d(0.0, 1.0);
    cvec v(n);
    double norm2 = 0.0;
    for (cplx& a : v) {
        a = cplx(d(gen), d(gen));
        norm2 += std::norm(a);
    }
    const double s = 1.0 / std::sqrt(norm2);
    for (cplx& a : v) a *= s;
    return v;
}

// RK4 for i d psi/dt = H psi without the unit-norm precondition of
// rk4_evolve (momentum blocks carry only a fraction of the total norm).
inline cvec evolve_linear(const rydsim::ApplyHFn& apply_h, const cvec& psi0,
                          const rydsim::IntegratorParams& ip) {
    cvec psi = psi0, hpsi(psi0.size());
    const rydsim::DerivFn f = [&](const cvec& y, double t, cvec& dydt) {
        apply_h(y, t, hpsi);
        const cplx mi(0.0, -1.0);
        dydt.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) dydt[i] = mi * hpsi[i];
    };
    rydsim::rk4_integrate(f, psi, ip);
    return psi;
}

inline cplx dot(const cvec& a, const cvec& b) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// exp(-i H t) for a 2x2 Hermitian H via the Pauli decomposition
// H = a0 I + ax sx + ay sy + az sz.
inline void expm_two_level(const cplx h[4], double t, cplx u[4]) {
    const double a0 = 0.5 * (h[0].real() + h[3].real());
    const double az = 0.5 * (h[0].real() - h[3].real());
    const double ax = h[1].real();
    const double ay = -h[1].imag(); // h01 = ax - i ay
    const double r = std::sqrt(ax * ax + ay * ay + az * az);
    const cplx phase = std::polar(1.0, -a0 * t);
    const double c = std::cos(r * t);
    const double s = r > 0.0 ? std::sin(r * t) / r : t;
    const cplx mi(0.0, -1.0);
    u[0] = phase * (c + mi * s * az);
    u[1] = phase * (mi * s * (ax - cplx(0.0, 1.0) * ay));
    u[2] = phase * (mi * s * (ax + cplx(0.0, 1.0) * ay));
    u[3] = phase * (c - mi * s * az);
}

// Closed-form amplitudes of the uniform tight-binding chain
// i dC_m/dt = J (C_{m-1} + C_{m+1}) from a delta start at m0:
// C_m(t) = (-i)^{m-m0} J_{m-m0}(2 J t). The Bessel call is the only shared
// ingredient with the library; the evolution path under test is RK4.
inline cplx tight_binding_amplitude(int m, int m0, double hop, double t, double jn(int, double)) {
    const int d = m - m0;
    cplx phase(1.0, 0.0);
    const cplx mi(0.0, -1.0);
    for (int i = 0; i < ((d % 4) + 4) % 4; ++i) phase *= mi;
    return phase * jn(d, 2.0 * hop * t);
}

} // namespace testsup
