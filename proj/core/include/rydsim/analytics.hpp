#pragma once

#include <optional>
#include <vector>

#include "rydsim/cluster_model.hpp"
#include "rydsim/lattice.hpp"

namespace rydsim {

// Sampled observables of one run. density_profiles is [sample][site]
// (sites are rung indices for ladder runs).
struct TimeSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> density_profiles;
    std::vector<double> sigma;
    std::vector<double> delta_sigma;
    std::vector<double> total_density;
    std::vector<double> autocorr;
};

std::vector<double> rydberg_density_cluster(const ClusterState& s);

// Population-weighted spatial variance of a density profile over coordinates
// x0, x0+1, ...; throws on zero total density.
double density_variance(const std::vector<double>& profile, double x0 = 1.0);

struct PowerLawFit {
    double beta;
    double intercept; // of log(dsigma) against log(t)
    double t_lo, t_hi;
    double residual; // RMS log residual
    int n_samples;
};

// Ordinary least squares of log(dsigma) vs log(t) over t in [t_lo, t_hi].
// Requires >= 10 samples in the window and dsigma > 0 throughout (the first
// offending sample is named in the error).
PowerLawFit fit_power_law(const std::vector<double>& t,
                          const std::vector<double>& dsigma,
                          double t_lo, double t_hi);

// Crossing point of two fitted log-log lines, in time units.
double fit_crossing_time(const PowerLawFit& a, const PowerLawFit& b);

// |<a|b>|^2
double autocorrelation(const cvec& a, const cvec& b);

struct RevivalPeak {
    double t_peak;
    double value;
    bool reliable; // false when the maximum sits on a window edge
};

// Maximum of the sampled autocorrelation inside [w_lo, w_hi], refined by a
// local quadratic through the three samples around the peak.
RevivalPeak find_revival_period(const std::vector<double>& t,
                                const std::vector<double>& a,
                                double w_lo, double w_hi);

// Least-squares slope of y against t over a window (used for the late-time
// total-density growth rate, reported but not asserted).
std::optional<double> linear_slope(const std::vector<double>& t,
                                   const std::vector<double>& y,
                                   double t_lo, double t_hi);

} // namespace rydsim
