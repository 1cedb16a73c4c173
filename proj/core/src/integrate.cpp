#include "rydsim/integrate.hpp"

#include <cmath>
#include <sstream>

#include "rydsim/errors.hpp"

namespace rydsim {

double norm_squared(const cvec& v) {
    double s = 0.0;
    for (const cplx& a : v) s += std::norm(a);
    return s;
}

namespace {

struct Rk4Work {
    cvec k1, k2, k3, k4, tmp;
    explicit Rk4Work(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

inline void rk4_step(const DerivFn& f, cvec& y, double t, double h, Rk4Work& w) {
    const std::size_t n = y.size();
    f(y, t, w.k1);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + 0.5 * h * w.k1[i];
    f(w.tmp, t + 0.5 * h, w.k2);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + 0.5 * h * w.k2[i];
    f(w.tmp, t + 0.5 * h, w.k3);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * w.k3[i];
    f(w.tmp, t + h, w.k4);
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h6 * (w.k1[i] + 2.0 * (w.k2[i] + w.k3[i]) + w.k4[i]);
}

} // namespace

void rk4_integrate(const DerivFn& f, cvec& y, const IntegratorParams& ip,
                   const Observer& observer) {
    const long n_steps = std::max<long>(1, std::llround(ip.t_end / ip.dt));
    const double h = ip.t_end / static_cast<double>(n_steps);
    Rk4Work w(y.size());
    if (observer) observer(0, 0.0, y);
    for (long s = 0; s < n_steps; ++s) {
        const double t = static_cast<double>(s) * h;
        rk4_step(f, y, t, h, w);
        if (observer && ((s + 1) % ip.sample_stride == 0 || s + 1 == n_steps))
            observer(s + 1, static_cast<double>(s + 1) * h, y);
    }
}

cvec rk4_evolve(const ApplyHFn& apply_h, const cvec& psi0,
                const IntegratorParams& ip, const Observer& observer) {
    cvec psi = psi0;
    cvec hpsi(psi.size());
    const DerivFn f = [&](const cvec& y, double t, cvec& dydt) {
        apply_h(y, t, hpsi);
        const cplx minus_i(0.0, -1.0);
        for (std::size_t i = 0; i < y.size(); ++i) dydt[i] = minus_i * hpsi[i];
    };
    const Observer checked = [&](long step, double t, const cvec& y) {
        const double drift = std::fabs(norm_squared(y) - 1.0);
        if (drift > 1e-4) {
            std::ostringstream msg;
            msg << "rk4_evolve: norm drift " << drift << " at t = " << t
                << " exceeds 1e-4; step too large for the spectral range";
            throw NumericalAbort(msg.str());
        }
        if (observer) observer(step, t, y);
    };
    rk4_integrate(f, psi, ip, checked);
    return psi;
}

} // namespace rydsim
