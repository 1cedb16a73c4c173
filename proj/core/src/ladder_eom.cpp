#include "rydsim/ladder_eom.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rydsim/errors.hpp"
#include "rydsim/special.hpp"

namespace rydsim {

double AmplitudeLadder::cos_half_k() const {
    return cospi(0.5 * k_over_pi);
}

AmplitudeLadder make_amplitude_ladder(int m_min, int m_max, double k_over_pi,
                                      const LatticeParams& p, const DriveParams& d) {
    if (m_min < 2)
        throw std::invalid_argument("make_amplitude_ladder: m_min must be >= 2");
    if (m_max < m_min)
        throw std::invalid_argument("make_amplitude_ladder: empty rung window");
    AmplitudeLadder l;
    l.m_min = m_min;
    l.m_max = m_max;
    l.k_over_pi = k_over_pi;
    l.f = resonant_frequency(p);
    l.delta_omega = d.omega - l.f;
    l.rungs.assign(l.dim(), cplx(0.0, 0.0));
    return l;
}

void eom_rhs_full(const AmplitudeLadder& l, const cvec& c, double t,
                  const DriveParams& d, cvec& dcdt) {
    const int n = l.dim();
    dcdt.resize(n);
    const double g = -2.0 * d.omega0 * d.omega / l.f * l.cos_half_k() *
                     std::sin(d.omega * t);
    const cplx up = std::polar(1.0, l.f * t);    // e^{+iFt} on C_{m-1}
    const cplx down = std::conj(up);             // e^{-iFt} on C_{m+1}
    for (int i = 0; i < n; ++i) {
        cplx v(0.0, 0.0);
        if (i > 0) v += c[i - 1] * up;
        if (i < n - 1) v -= c[i + 1] * down;
        dcdt[i] = g * v;
    }
}

namespace {

// Shared kernel for the rotating-wave and near-resonant forms:
// i dC_m/dt = amp [C_{m-1} e^{-i dw t} + C_{m+1} e^{+i dw t}].
void tilted_chain_rhs(double amp, double dw, const cvec& c, double t, cvec& dcdt) {
    const int n = static_cast<int>(c.size());
    dcdt.resize(n);
    const cplx lower = std::polar(1.0, -dw * t);
    const cplx upper = std::conj(lower);
    const cplx minus_i(0.0, -1.0);
    for (int i = 0; i < n; ++i) {
        cplx v(0.0, 0.0);
        if (i > 0) v += c[i - 1] * lower;
        if (i < n - 1) v += c[i + 1] * upper;
        dcdt[i] = minus_i * amp * v;
    }
}

} // namespace

void eom_rhs_rwa(const AmplitudeLadder& l, const cvec& c, double t,
                 const DriveParams& d, cvec& dcdt) {
    const double dw = d.omega - l.f;
    if (std::fabs(dw) / l.f >= 0.1) {
        std::ostringstream msg;
        msg << "eom_rhs_rwa: |delta omega|/F = " << std::fabs(dw) / l.f
            << " outside the rotating-wave domain (< 0.1)";
        throw std::domain_error(msg.str());
    }
    tilted_chain_rhs(d.omega0 * d.omega / l.f * l.cos_half_k(), dw, c, t, dcdt);
}

void eom_rhs_resonant(const AmplitudeLadder& l, const cvec& c, double t,
                      const DriveParams& d, cvec& dcdt) {
    (void)t;
    tilted_chain_rhs(d.omega0 * l.cos_half_k(), 0.0, c, t, dcdt);
}

void eom_rhs_detuned(const AmplitudeLadder& l, const cvec& c, double t,
                     const DriveParams& d, cvec& dcdt) {
    tilted_chain_rhs(d.omega0 * d.omega / l.f * l.cos_half_k(), d.omega - l.f,
                     c, t, dcdt);
}

DerivFn ladder_rhs(const AmplitudeLadder& l, const DriveParams& d, LadderVariant v) {
    switch (v) {
        case LadderVariant::full:
            return [&l, d](const cvec& c, double t, cvec& out) {
                eom_rhs_full(l, c, t, d, out);
            };
        case LadderVariant::rwa:
            return [&l, d](const cvec& c, double t, cvec& out) {
                eom_rhs_rwa(l, c, t, d, out);
            };
        case LadderVariant::resonant:
            return [&l, d](const cvec& c, double t, cvec& out) {
                eom_rhs_resonant(l, c, t, d, out);
            };
        case LadderVariant::detuned:
            return [&l, d](const cvec& c, double t, cvec& out) {
                eom_rhs_detuned(l, c, t, d, out);
            };
    }
    throw std::logic_error("ladder_rhs: unknown variant");
}

double ladder_variance(const AmplitudeLadder& l, const cvec& rungs) {
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < static_cast<int>(rungs.size()); ++i) {
        const double p = std::norm(rungs[i]);
        const double m = l.m_min + i;
        w += p;
        m1 += p * m;
        m2 += p * m * m;
    }
    m1 /= w;
    m2 /= w;
    return m2 - m1 * m1;
}

void evolve_ladder(AmplitudeLadder& l, const DriveParams& d, LadderVariant v,
                   const IntegratorParams& ip, const Observer& observer) {
    const DerivFn f = ladder_rhs(l, d, v);
    const Observer checked = [&](long step, double t, const cvec& y) {
        const double drift = std::fabs(norm_squared(y) - 1.0);
        if (drift > 1e-4) {
            std::ostringstream msg;
            msg << "evolve_ladder: norm drift " << drift << " at t = " << t;
            throw NumericalAbort(msg.str());
        }
        if (observer) observer(step, t, y);
    };
    rk4_integrate(f, l.rungs, ip, checked);
}

} // namespace rydsim
