#include <doctest.h>

#include <cmath>

#include "rydsim/cluster_model.hpp"
#include "rydsim/integrate.hpp"
#include "rydsim/ladder_eom.hpp"
#include "rydsim/special.hpp"
#include "support.hpp"

using namespace rydsim;

namespace {

const LatticeParams kLattice(100, 5.0, 6);

AmplitudeLadder delta_ladder(int m_min, int m_max, double k_over_pi,
                             const DriveParams& d, int m0) {
    AmplitudeLadder l = make_amplitude_ladder(m_min, m_max, k_over_pi, kLattice, d);
    l.rungs[m0 - m_min] = cplx(1.0, 0.0);
    return l;
}

double norm_derivative(const cvec& c, const cvec& dcdt) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) s += std::conj(c[i]) * dcdt[i];
    return 2.0 * s.real();
}

} // namespace

TEST_CASE("trivial zeros of the rung equations") {
    const DriveParams d(1.0, 5.0867);
    AmplitudeLadder l = delta_ladder(2, 40, 0.0, d, 20);
    cvec dcdt;
    eom_rhs_full(l, l.rungs, 0.0, d, dcdt); // sin(0) = 0
    for (const cplx& v : dcdt) CHECK(v == cplx(0.0, 0.0));

    AmplitudeLadder at_pi = delta_ladder(2, 40, 1.0, d, 20);
    CHECK(at_pi.cos_half_k() == 0.0);
    for (double t : {0.0, 0.3, 1.7}) {
        eom_rhs_full(at_pi, at_pi.rungs, t, d, dcdt);
        for (const cplx& v : dcdt) CHECK(v == cplx(0.0, 0.0));
        eom_rhs_resonant(at_pi, at_pi.rungs, t, d, dcdt);
        for (const cplx& v : dcdt) CHECK(v == cplx(0.0, 0.0));
    }
    // and the k = pi ladder is frozen under full evolution
    AmplitudeLadder frozen = delta_ladder(2, 40, 1.0, d, 20);
    evolve_ladder(frozen, d, LadderVariant::resonant, IntegratorParams(1e-3, 5.0, 5000));
    CHECK(std::abs(frozen.rungs[18] - cplx(1.0, 0.0)) == 0.0);
}

TEST_CASE("ladder construction guards") {
    const DriveParams d(1.0, 5.0867);
    CHECK_THROWS_AS(make_amplitude_ladder(1, 40, 0.0, kLattice, d), std::invalid_argument);
    CHECK_THROWS_AS(make_amplitude_ladder(10, 9, 0.0, kLattice, d), std::invalid_argument);
    const AmplitudeLadder l = make_amplitude_ladder(2, 40, 0.0, kLattice, d);
    CHECK(l.f == resonant_frequency(kLattice));
    CHECK(l.delta_omega == doctest::Approx(5.0867 - l.f).epsilon(1e-12));
}

TEST_CASE("rotating-wave form") {
    const double f = resonant_frequency(kLattice);
    auto gen = testsup::rng(17);

    // at delta omega = 0 it coincides with the resonant chain
    const DriveParams resonant_drive(1.0, f);
    AmplitudeLadder l = make_amplitude_ladder(2, 60, 1.0 / 3.0, kLattice, resonant_drive);
    l.rungs = testsup::random_state(l.dim(), gen);
    cvec a, b;
    for (double t : {0.0, 0.4, 2.2}) {
        eom_rhs_rwa(l, l.rungs, t, resonant_drive, a);
        eom_rhs_resonant(l, l.rungs, t, resonant_drive, b);
        CHECK(testsup::max_abs_diff(a, b) < 1e-15);
        eom_rhs_detuned(l, l.rungs, t, resonant_drive, a);
        CHECK(testsup::max_abs_diff(a, b) < 1e-15);
    }

    // outside the rotating-wave domain the call is rejected
    const DriveParams far(1.0, 1.2 * f);
    CHECK_THROWS_AS(eom_rhs_rwa(l, l.rungs, 0.0, far, a), std::domain_error);

    // every variant conserves the norm pointwise
    const DriveParams nearres(1.0, f + 0.05);
    for (double t : {0.1, 0.9, 3.3}) {
        eom_rhs_full(l, l.rungs, t, nearres, a);
        CHECK(std::fabs(norm_derivative(l.rungs, a)) < 1e-12);
        eom_rhs_rwa(l, l.rungs, t, nearres, a);
        CHECK(std::fabs(norm_derivative(l.rungs, a)) < 1e-12);
        eom_rhs_resonant(l, l.rungs, t, nearres, a);
        CHECK(std::fabs(norm_derivative(l.rungs, a)) < 1e-12);
        eom_rhs_detuned(l, l.rungs, t, nearres, a);
        CHECK(std::fabs(norm_derivative(l.rungs, a)) < 1e-12);
    }
}

TEST_CASE("resonant chain follows the Bessel solution") {
    const double f = resonant_frequency(kLattice);
    const DriveParams d(1.0, f);
    AmplitudeLadder l = delta_ladder(10, 210, 0.0, d, 110);
    const double hop = d.omega0 * l.cos_half_k();
    double worst = 0.0;
    std::vector<std::pair<double, double>> var_series;
    evolve_ladder(l, d, LadderVariant::resonant, IntegratorParams(1e-4, 20.0, 2000),
                  [&](long, double t, const cvec& y) {
                      for (int i = 0; i < l.dim(); ++i) {
                          const cplx ref = testsup::tight_binding_amplitude(
                              l.m_min + i, 110, hop, t, bessel_jn);
                          worst = std::max(worst, std::abs(y[i] - ref));
                      }
                      var_series.emplace_back(t, ladder_variance(l, y));
                  });
    CHECK(worst < 1e-6);

    // ballistic spread: variance = 2 (Omega0 cos(k/2))^2 t^2, beta = 2.00(2)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [t, v] : var_series) {
        if (t < 1.0) continue;
        CHECK(v == doctest::Approx(2.0 * hop * hop * t * t).epsilon(1e-6));
        const double x = std::log(t), y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    const double beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::fabs(beta - 2.0) < 0.02);
}

TEST_CASE("rotating-wave form tracks the exact equation on drive-period averages") {
    // at the resonant drive the terms the rotating-wave step drops oscillate
    // at F + w; their first-order effect is within-period population wiggle
    // that a one-period average suppresses, leaving only the slow
    // second-order (Bloch-Siegert-like) deviation, measured at 1.4e-2 by
    // t ~ 10 for Omega0 = 1 versus ~7e-2 instantaneous
    const DriveParams d(1.0, 5.0867); // |w - F| / F = 3e-6
    const int m_min = 2, m_max = 160, m0 = 80;
    const double t_drive = 2.0 * M_PI / d.omega;
    const int per_period = 64;
    const IntegratorParams ip(t_drive / (1000 * per_period), 8.0 * t_drive,
                              1000); // samples 64 x per period, t_end ~ 9.9

    const auto sampled_populations = [&](LadderVariant v) {
        AmplitudeLadder l = delta_ladder(m_min, m_max, 0.0, d, m0);
        std::vector<std::vector<double>> pops;
        evolve_ladder(l, d, v, ip, [&](long, double, const cvec& y) {
            std::vector<double> p(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::norm(y[i]);
            pops.push_back(std::move(p));
        });
        return pops;
    };
    const auto period_average = [&](const std::vector<std::vector<double>>& pops) {
        std::vector<std::vector<double>> avg;
        for (std::size_t start = 1; start + per_period <= pops.size();
             start += per_period) {
            std::vector<double> a(pops[0].size(), 0.0);
            for (std::size_t s = start; s < start + per_period; ++s)
                for (std::size_t i = 0; i < a.size(); ++i) a[i] += pops[s][i];
            for (double& x : a) x /= per_period;
            avg.push_back(std::move(a));
        }
        return avg;
    };

    const auto full_pops = sampled_populations(LadderVariant::full);
    const auto rwa_pops = sampled_populations(LadderVariant::rwa);
    REQUIRE(full_pops.size() == rwa_pops.size());
    double instant = 0.0;
    for (std::size_t s = 0; s < full_pops.size(); ++s)
        for (std::size_t i = 0; i < full_pops[s].size(); ++i)
            instant = std::max(instant, std::fabs(full_pops[s][i] - rwa_pops[s][i]));

    const auto full = period_average(full_pops);
    const auto rwa = period_average(rwa_pops);
    REQUIRE(full.size() >= 7);
    double averaged = 0.0;
    for (std::size_t s = 0; s < full.size(); ++s)
        for (std::size_t i = 0; i < full[s].size(); ++i)
            averaged = std::max(averaged, std::fabs(full[s][i] - rwa[s][i]));
    CHECK(averaged < 2e-2);
    CHECK(averaged < instant / 3.0); // the averaging is what buys the agreement
    CHECK(averaged > 1e-8);          // and the two equations genuinely differ
}

TEST_CASE("gauge equivalence of the detuned chain") {
    const double f = resonant_frequency(kLattice);
    const double dw = 0.05;
    const DriveParams d(1.0, f + dw);
    const int m_min = 2, m_max = 240, m0 = 120;
    AmplitudeLadder l = delta_ladder(m_min, m_max, 0.0, d, m0);
    const double omega_k = d.omega0 * d.omega / f;

    // twin chain: static hopping plus linear tilt, then gauge back
    cvec twin(l.dim(), cplx(0.0, 0.0));
    twin[m0 - m_min] = 1.0;
    const DerivFn tilted = [&](const cvec& c, double, cvec& out) {
        out.resize(c.size());
        const cplx mi(0.0, -1.0);
        for (int i = 0; i < static_cast<int>(c.size()); ++i) {
            cplx acc = -dw * static_cast<double>(m_min + i) * c[i];
            if (i > 0) acc += omega_k * c[i - 1];
            if (i + 1 < static_cast<int>(c.size())) acc += omega_k * c[i + 1];
            out[i] = mi * acc;
        }
    };
    const IntegratorParams ip(1e-4, 3.0, 30000);
    rk4_integrate(tilted, twin, ip);
    evolve_ladder(l, d, LadderVariant::detuned, ip);
    double worst = 0.0;
    for (int i = 0; i < l.dim(); ++i) {
        const cplx gauge = std::polar(1.0, -dw * 3.0 * static_cast<double>(m_min + i));
        worst = std::max(worst, std::abs(l.rungs[i] - gauge * twin[i]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("detuned chain revives with the Bloch period") {
    const double f = resonant_frequency(kLattice);
    const double dw = 0.05;
    const DriveParams d(1.0, f + dw);
    const int m_min = 2, m_max = 300, m0 = 150;
    AmplitudeLadder l = make_amplitude_ladder(m_min, m_max, 0.0, kLattice, d);
    // gaussian rung packet
    double norm2 = 0.0;
    for (int i = 0; i < l.dim(); ++i) {
        const double w = std::exp(-std::pow(m_min + i - m0, 2) / (4.0 * 9.0));
        l.rungs[i] = w;
        norm2 += w * w;
    }
    for (cplx& c : l.rungs) c *= 1.0 / std::sqrt(norm2);
    const cvec c0 = l.rungs;

    std::vector<double> ts, autoc, var;
    double drift = 0.0;
    evolve_ladder(l, d, LadderVariant::detuned, IntegratorParams(1e-3, 140.0, 20),
                  [&](long, double t, const cvec& y) {
                      ts.push_back(t);
                      autoc.push_back(std::norm(testsup::dot(c0, y)));
                      var.push_back(ladder_variance(l, y));
                      drift = std::max(drift, std::fabs(norm_squared(y) - 1.0));
                  });
    CHECK(drift < 1e-6);
    // highest overlap revival sits at T = 2 pi / dw = 125.66
    double best_t = 0.0, best = -1.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] >= 100.0 && ts[i] <= 140.0 && autoc[i] > best) {
            best = autoc[i];
            best_t = ts[i];
        }
    CHECK(std::fabs(best_t - 2.0 * M_PI / dw) < 3.0);
    CHECK(best > 0.9);

    // ladder-variance autocorrelation peaks at the same period (2% window)
    double mean = 0.0;
    for (double v : var) mean += v;
    mean /= var.size();
    const auto vac = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < var.size(); ++i)
            s += (var[i] - mean) * (var[i + lag] - mean);
        return s / (var.size() - lag);
    };
    std::size_t best_lag = 0;
    double best_v = -1e300;
    const double dt_sample = ts[1] - ts[0];
    for (std::size_t lag = static_cast<std::size_t>(60.0 / dt_sample);
         lag < static_cast<std::size_t>(140.0 / dt_sample) && lag < var.size(); ++lag)
        if (vac(lag) > best_v) {
            best_v = vac(lag);
            best_lag = lag;
        }
    CHECK(std::fabs(best_lag * dt_sample - 2.0 * M_PI / dw) < 0.02 * 2.0 * M_PI / dw);
}

TEST_CASE("rotating-wave error scales down with the drive") {
    const double f = resonant_frequency(kLattice);
    const DriveParams weak(0.25, f + 0.05), strong(0.5, f + 0.05);
    const int m_min = 2, m_max = 280, m0 = 140;
    const IntegratorParams ip(1e-3, 125.7, 500); // one Bloch-like period

    const auto deviation = [&](const DriveParams& d) {
        AmplitudeLadder a = delta_ladder(m_min, m_max, 0.0, d, m0);
        AmplitudeLadder b = delta_ladder(m_min, m_max, 0.0, d, m0);
        double dev = 0.0;
        std::vector<cvec> full_states;
        evolve_ladder(a, d, LadderVariant::full, ip,
                      [&](long, double, const cvec& y) { full_states.push_back(y); });
        std::size_t i = 0;
        evolve_ladder(b, d, LadderVariant::rwa, ip, [&](long, double, const cvec& y) {
            dev = std::max(dev, testsup::max_abs_diff(y, full_states.at(i++)));
        });
        return dev;
    };
    const double dev_strong = deviation(strong);
    const double dev_weak = deviation(weak);
    CHECK(dev_weak <= 0.5 * dev_strong * 1.02);
    CHECK(dev_strong > dev_weak);
}

TEST_CASE("rung populations match the block evolution in the ladder basis") {
    // evolve a Wannier-Stark state under the exact momentum-block Hamiltonian
    // and compare its ladder populations with the rung equation of motion
    const int n = 84;
    const LatticeParams p(n, 5.0, 6);
    const double f = resonant_frequency(p);
    const DriveParams d(1.0, f);
    const SkewPotential u = build_skew_potential(p);
    const int m_idx = 14; // k = 2 pi m / N = pi / 3
    const double k = 2.0 * M_PI * m_idx / n;
    const int m0 = 40;

    MomentumBlockState b{n, m_idx, wannier_stark_state(m0, k, 0.0, p, d, n - 1)};
    const IntegratorParams ip(1e-4, 1.0, 2500);
    std::vector<std::pair<double, cvec>> snaps;
    const ApplyHFn apply = [&](const cvec& in, double t, cvec& o) {
        MomentumBlockState tmp{n, m_idx, in}, ob;
        apply_hk(tmp, t, p, d, HoppingConvention::paper_verbatim, u, ob);
        o = std::move(ob.amplitudes);
    };
    rk4_evolve(apply, b.amplitudes, ip, [&](long, double t, const cvec& y) {
        snaps.emplace_back(t, y);
    });

    AmplitudeLadder l = make_amplitude_ladder(2, n - 1, k / M_PI, p, d);
    l.rungs[m0 - l.m_min] = 1.0;
    std::size_t snap = 0;
    double worst = 0.0;
    evolve_ladder(l, d, LadderVariant::full, ip, [&](long, double t, const cvec& y) {
        const cvec& block = snaps.at(snap++).second;
        for (int m = 25; m <= 55; ++m) {
            const cvec phi = wannier_stark_state(m, k, t, p, d, n - 1);
            const double block_pop = std::norm(testsup::dot(phi, block));
            const double ladder_pop = std::norm(y[m - l.m_min]);
            worst = std::max(worst, std::fabs(block_pop - ladder_pop));
        }
    });
    CHECK(worst < 1e-4);
    CHECK(snap == snaps.size());
}
