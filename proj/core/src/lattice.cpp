#include "rydsim/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rydsim {

LatticeParams::LatticeParams(int n_sites_, double v0_, int alpha_, Boundary boundary_)
    : n_sites(n_sites_), v0(v0_), alpha(alpha_), boundary(boundary_) {
    if (n_sites < 1)
        throw std::invalid_argument("LatticeParams: n_sites must be >= 1");
    if (v0 < 0.0)
        throw std::invalid_argument("LatticeParams: v0 must be >= 0");
    if (alpha != 3 && alpha != 6)
        throw std::invalid_argument("LatticeParams: alpha must be 3 or 6, got " +
                                    std::to_string(alpha));
}

DriveParams::DriveParams(double omega0_, double omega_)
    : omega0(omega0_), omega(omega_) {
    if (omega0 < 0.0)
        throw std::invalid_argument("DriveParams: omega0 must be >= 0");
    if (omega < 0.0)
        throw std::invalid_argument("DriveParams: omega must be >= 0");
}

IntegratorParams::IntegratorParams(double dt_, double t_end_, int sample_stride_)
    : dt(dt_), t_end(t_end_), sample_stride(sample_stride_) {
    if (!(dt > 0.0) || !(dt <= t_end))
        throw std::invalid_argument("IntegratorParams: require 0 < dt <= t_end");
    if (sample_stride < 1)
        throw std::invalid_argument("IntegratorParams: sample_stride must be >= 1");
}

double drive_amplitude(const DriveParams& d, double t) {
    return d.omega0 * std::cos(d.omega * t);
}

int site_distance(const LatticeParams& p, int i, int j) {
    int d = std::abs(i - j);
    if (p.boundary == Boundary::periodic)
        d = std::min(d, p.n_sites - d);
    return d;
}

double interaction_strength(const LatticeParams& p, int i, int j) {
    if (i < 1 || i > p.n_sites || j < 1 || j > p.n_sites)
        throw std::invalid_argument("interaction_strength: site index out of range");
    if (i == j)
        throw std::invalid_argument("interaction_strength: i == j has no pair interaction");
    const int d = site_distance(p, i, j);
    return p.v0 / std::pow(static_cast<double>(d), p.alpha);
}

double resonant_frequency(const LatticeParams& p, int r) {
    if (r < 2)
        throw std::invalid_argument("resonant_frequency: cluster size r must be >= 2");
    double f = 0.0;
    for (int l = 1; l <= r - 1; ++l)
        f += p.v0 / std::pow(static_cast<double>(l), p.alpha);
    return f;
}

double resonant_frequency(const LatticeParams& p) {
    double f = 0.0;
    for (int l = 1;; ++l) {
        const double term = p.v0 / std::pow(static_cast<double>(l), p.alpha);
        if (term < 1e-12) break;
        f += term;
    }
    return f;
}

} // namespace rydsim
