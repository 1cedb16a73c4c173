#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "rydsim/analytics.hpp"
#include "support.hpp"

using namespace rydsim;

TEST_CASE("cluster-basis density") {
    const LatticeParams p(100, 5.0);
    const std::vector<double> d = rydberg_density_cluster(build_cluster_state(p, 46, 55));
    for (int j = 1; j <= 100; ++j)
        CHECK(d[j - 1] == doctest::Approx(j >= 46 && j <= 55 ? 1.0 : 0.0));

    const LatticeParams small(6, 5.0);
    ClusterState s = make_cluster_state(small);
    s.at(1, 1) = cplx(1.0 / std::sqrt(2.0), 0.0);
    s.at(2, 2) = cplx(1.0 / std::sqrt(2.0), 0.0);
    const std::vector<double> half = rydberg_density_cluster(s);
    CHECK(half[0] == doctest::Approx(0.5));
    CHECK(half[1] == doctest::Approx(0.5));
    CHECK(half[2] == 0.0);
}

TEST_CASE("total density equals weight times size") {
    const LatticeParams p(30, 5.0);
    auto gen = testsup::rng(23);
    ClusterState s{30, testsup::random_state(cluster_dim(30), gen)};
    const std::vector<double> profile = rydberg_density_cluster(s);
    double from_profile = 0.0;
    for (double v : profile) from_profile += v;
    double from_amps = 0.0;
    for (int j1 = 1; j1 <= 30; ++j1)
        for (int j2 = j1; j2 <= 30; ++j2)
            from_amps += std::norm(s.at(j1, j2)) * (j2 - j1 + 1);
    CHECK(from_profile == doctest::Approx(from_amps).epsilon(1e-9));
}

TEST_CASE("density variance") {
    // uniform block of r0 sites has variance (r0^2 - 1)/12
    std::vector<double> block(20, 0.0);
    for (int j = 8; j < 12; ++j) block[j] = 1.0;
    CHECK(density_variance(block) == doctest::Approx(15.0 / 12.0).epsilon(1e-12));

    std::vector<double> single(20, 0.0);
    single[7] = 0.3;
    CHECK(density_variance(single) == doctest::Approx(0.0));

    // translation invariance and bounds on random profiles
    auto gen = testsup::rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 40;
        std::vector<double> prof(n, 0.0), shifted(n, 0.0);
        for (int j = 0; j < n - 5; ++j) prof[j] = u(gen);
        for (int j = 0; j < n - 5; ++j) shifted[j + 5] = prof[j];
        const double v = density_variance(prof);
        CHECK(v >= 0.0);
        CHECK(v <= (n * n - 1.0) / 4.0);
        CHECK(density_variance(shifted) == doctest::Approx(v).epsilon(1e-9));
    }

    CHECK_THROWS_AS(density_variance(std::vector<double>(10, 0.0)), std::invalid_argument);
}

TEST_CASE("power-law fit") {
    std::vector<double> t, ds;
    for (double x = 0.5; x <= 30.0; x += 0.02) {
        t.push_back(x);
        ds.push_back(0.7 * x * x);
    }
    const PowerLawFit quad = fit_power_law(t, ds, 2.0, 12.0);
    CHECK(std::fabs(quad.beta - 2.0) < 1e-6);
    CHECK(quad.residual < 1e-10);
    CHECK(quad.intercept == doctest::Approx(std::log(0.7)).epsilon(1e-6));

    for (std::size_t i = 0; i < ds.size(); ++i) ds[i] = 3.1 * std::pow(t[i], 0.37);
    CHECK(std::fabs(fit_power_law(t, ds, 1.0, 25.0).beta - 0.37) < 1e-6);

    // nonpositive values are rejected, naming the first offender
    ds[200] = -1.0;
    const double bad_t = t[200];
    try {
        fit_power_law(t, ds, 2.0, 12.0);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        std::ostringstream expect;
        expect << "t = " << bad_t;
        CHECK(std::string(e.what()).find(expect.str()) != std::string::npos);
    }

    CHECK_THROWS_AS(fit_power_law(t, ds, 29.9, 30.0), std::invalid_argument); // < 10 samples
    CHECK_THROWS_AS(fit_power_law(t, ds, 5.0, 4.0), std::invalid_argument);

    // crossing of two fitted lines
    PowerLawFit a{2.0, 0.0, 0, 0, 0.0, 0};
    PowerLawFit b{1.0, std::log(13.0), 0, 0, 0.0, 0};
    CHECK(fit_crossing_time(a, b) == doctest::Approx(13.0).epsilon(1e-12));
}

TEST_CASE("autocorrelation") {
    auto gen = testsup::rng(41);
    const cvec a = testsup::random_state(64, gen);
    const cvec b = testsup::random_state(64, gen);
    CHECK(autocorrelation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(autocorrelation(a, b) == doctest::Approx(autocorrelation(b, a)).epsilon(1e-12));
    cvec e0(4, cplx(0.0, 0.0)), e1(4, cplx(0.0, 0.0));
    e0[0] = 1.0;
    e1[1] = 1.0;
    CHECK(autocorrelation(e0, e1) == 0.0);
    CHECK_THROWS_AS(autocorrelation(a, e0), std::invalid_argument);
}

TEST_CASE("revival peak search") {
    std::vector<double> t, a;
    const double dw = 0.05;
    for (double x = 0.0; x <= 200.0; x += 0.02) {
        t.push_back(x);
        a.push_back(std::pow(std::cos(0.5 * dw * x), 2));
    }
    const RevivalPeak peak = find_revival_period(t, a, 100.0, 150.0);
    CHECK(peak.reliable);
    CHECK(std::fabs(peak.t_peak - 2.0 * M_PI / dw) < 0.02);
    CHECK(peak.value == doctest::Approx(1.0).epsilon(1e-6));

    // monotone decay: the maximum sits on the window edge and is flagged
    std::vector<double> decay;
    for (double x : t) decay.push_back(1.0 / (1.0 + x));
    CHECK_FALSE(find_revival_period(t, decay, 100.0, 150.0).reliable);

    CHECK_THROWS_AS(find_revival_period(t, a, -1.0, 150.0), std::invalid_argument);
    CHECK_THROWS_AS(find_revival_period(t, a, 100.0, 500.0), std::invalid_argument);
}

TEST_CASE("linear slope helper") {
    std::vector<double> t, y;
    for (double x = 0.0; x < 10.0; x += 0.1) {
        t.push_back(x);
        y.push_back(3.0 + 0.25 * x);
    }
    CHECK(*linear_slope(t, y, 2.0, 8.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_FALSE(linear_slope(t, y, 20.0, 30.0).has_value());
}
