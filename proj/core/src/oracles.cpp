#include "rydsim/oracles.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "rydsim/errors.hpp"
#include "rydsim/integrate.hpp"

namespace rydsim {

double p_ground_to_rydberg(const TwoLevelParams& p, double t) {
    if (!(p.omega > 0.0))
        throw std::invalid_argument("p_ground_to_rydberg: omega must be > 0");
    const double s = std::sin(p.omega0 * std::sin(p.omega * t) / (2.0 * p.omega));
    return s * s;
}

PerturbativeProbability p_rydberg_to_ground(const TwoLevelParams& p, double t) {
    if (!(p.omega0 > 0.0))
        throw std::invalid_argument("p_rydberg_to_ground: omega0 must be > 0");
    if (p.omega0 > p.delta_eff / 5.0)
        throw std::invalid_argument(
            "p_rydberg_to_ground: outside the perturbative domain Omega0 <= Delta_eff/5");
    const double det = p.delta_eff - p.omega;
    if (std::fabs(det) < 1e-12 * (p.delta_eff + p.omega)) {
        // the first-order formula is singular at Delta_eff = omega
        return {p.omega0 * p.omega0 * t * t / 16.0, true};
    }
    const double s = std::sin(0.5 * det * t);
    return {p.omega0 * p.omega0 * s * s / (4.0 * det * det), false};
}

std::pair<cplx, cplx> exact_two_level_evolution(const TwoLevelParams& p, double t,
                                                TwoLevelInitial initial) {
    if (p.delta_eff == 0.0) {
        const double theta = p.omega > 0.0
                                 ? p.omega0 * std::sin(p.omega * t) / (2.0 * p.omega)
                                 : 0.5 * p.omega0 * t; // static drive limit
        const cplx minus_i(0.0, -1.0);
        if (initial == TwoLevelInitial::ground)
            return {minus_i * std::sin(theta), std::cos(theta)};
        return {std::cos(theta), minus_i * std::sin(theta)};
    }
    // dense 2x2 RK4 in the |up>, |down> basis
    cvec psi(2, cplx(0.0, 0.0));
    psi[initial == TwoLevelInitial::ground ? 1 : 0] = 1.0;
    const DerivFn f = [&p](const cvec& y, double tt, cvec& dydt) {
        const double half_drive = 0.5 * p.omega0 * std::cos(p.omega * tt);
        const cplx minus_i(0.0, -1.0);
        dydt.resize(2);
        dydt[0] = minus_i * (p.delta_eff * y[0] + half_drive * y[1]);
        dydt[1] = minus_i * (half_drive * y[0]);
    };
    rk4_integrate(f, psi, IntegratorParams(1e-5, t, 1 << 30));
    return {psi[0], psi[1]};
}

cvec assemble_dense_full(const LatticeParams& p, const DriveParams& d, double t) {
    if (p.n_sites > 6)
        throw CapacityError("assemble_dense_full: dense reference capped at N = 6");
    const int n = p.n_sites;
    const std::size_t dim = std::size_t{1} << n;
    cvec h(dim * dim, cplx(0.0, 0.0));
    const double half_drive = 0.5 * drive_amplitude(d, t);
    for (std::size_t b = 0; b < dim; ++b) {
        double e = 0.0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if ((b >> (i - 1) & 1) && (b >> (j - 1) & 1))
                    e += interaction_strength(p, i, j);
        h[b * dim + b] = e;
        for (int j = 0; j < n; ++j)
            h[(b ^ (std::size_t{1} << j)) * dim + b] += half_drive;
    }
    return h;
}

FullState brute_force_full_evolve(const LatticeParams& p, const DriveParams& d,
                                  const FullState& psi0, const IntegratorParams& ip) {
    if (p.n_sites > 6)
        throw CapacityError("brute_force_full_evolve: dense reference capped at N = 6");
    const std::size_t dim = std::size_t{1} << p.n_sites;
    if (psi0.amplitudes.size() != dim)
        throw std::invalid_argument("brute_force_full_evolve: dimension mismatch");
    const ApplyHFn apply = [&](const cvec& in, double t, cvec& out) {
        const cvec h = assemble_dense_full(p, d, t);
        out.assign(dim, cplx(0.0, 0.0));
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b)
                out[a] += h[a * dim + b] * in[b];
    };
    FullState out;
    out.n_sites = p.n_sites;
    out.amplitudes = rk4_evolve(apply, psi0.amplitudes, ip);
    return out;
}

} // namespace rydsim
