#include "rydsim/analytics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rydsim {

std::vector<double> rydberg_density_cluster(const ClusterState& s) {
    const int n = s.n_sites;
    // difference trick: each cluster adds its weight to the contiguous block
    std::vector<double> diff(n + 1, 0.0);
    for (int r = 1; r <= n; ++r) {
        const std::size_t off = cluster_offset(n, r);
        for (int j1 = 1; j1 <= n - r + 1; ++j1) {
            const double w = std::norm(s.amplitudes[off + (j1 - 1)]);
            if (w == 0.0) continue;
            diff[j1 - 1] += w;
            diff[j1 - 1 + r] -= w;
        }
    }
    std::vector<double> density(n);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        acc += diff[j];
        density[j] = acc;
    }
    return density;
}

double density_variance(const std::vector<double>& profile, double x0) {
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double x = x0 + static_cast<double>(i);
        w += profile[i];
        m1 += profile[i] * x;
        m2 += profile[i] * x * x;
    }
    if (!(w > 0.0))
        throw std::invalid_argument("density_variance: zero total density");
    m1 /= w;
    m2 /= w;
    return m2 - m1 * m1;
}

PowerLawFit fit_power_law(const std::vector<double>& t,
                          const std::vector<double>& dsigma,
                          double t_lo, double t_hi) {
    if (t.size() != dsigma.size())
        throw std::invalid_argument("fit_power_law: length mismatch");
    if (!(t_lo < t_hi))
        throw std::invalid_argument("fit_power_law: need t_lo < t_hi");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (!(dsigma[i] > 0.0)) {
            std::ostringstream msg;
            msg << "fit_power_law: nonpositive delta sigma " << dsigma[i]
                << " at t = " << t[i];
            throw std::invalid_argument(msg.str());
        }
        const double x = std::log(t[i]);
        const double y = std::log(dsigma[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 10)
        throw std::invalid_argument("fit_power_law: fewer than 10 samples in window");
    const double denom = n * sxx - sx * sx;
    PowerLawFit fit;
    fit.beta = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.beta * sx) / n;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.n_samples = n;
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        const double r = std::log(dsigma[i]) - (fit.intercept + fit.beta * std::log(t[i]));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

double fit_crossing_time(const PowerLawFit& a, const PowerLawFit& b) {
    return std::exp((b.intercept - a.intercept) / (a.beta - b.beta));
}

double autocorrelation(const cvec& a, const cvec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("autocorrelation: dimension mismatch");
    cplx ov(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) ov += std::conj(a[i]) * b[i];
    return std::norm(ov);
}

RevivalPeak find_revival_period(const std::vector<double>& t,
                                const std::vector<double>& a,
                                double w_lo, double w_hi) {
    if (t.size() != a.size() || t.empty())
        throw std::invalid_argument("find_revival_period: bad series");
    if (w_lo < t.front() || w_hi > t.back())
        throw std::invalid_argument("find_revival_period: window outside sampled range");
    std::size_t first = t.size(), last = 0, best = 0;
    bool any = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < w_lo || t[i] > w_hi) continue;
        if (!any) { first = i; best = i; any = true; }
        last = i;
        if (a[i] > a[best]) best = i;
    }
    if (!any)
        throw std::invalid_argument("find_revival_period: no samples in window");
    RevivalPeak peak;
    peak.t_peak = t[best];
    peak.value = a[best];
    peak.reliable = best != first && best != last;
    if (peak.reliable) {
        // quadratic through the three samples around the peak
        const double y0 = a[best - 1], y1 = a[best], y2 = a[best + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
            const double h = 0.5 * (t[best + 1] - t[best - 1]);
            peak.t_peak = t[best] - 0.5 * h * (y2 - y0) / denom;
            peak.value = y1 - 0.125 * (y2 - y0) * (y2 - y0) / denom;
        }
    }
    return peak;
}

std::optional<double> linear_slope(const std::vector<double>& t,
                                   const std::vector<double>& y,
                                   double t_lo, double t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        sx += t[i]; sy += y[i]; sxx += t[i] * t[i]; sxy += t[i] * y[i];
        ++n;
    }
    if (n < 2) return std::nullopt;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace rydsim
