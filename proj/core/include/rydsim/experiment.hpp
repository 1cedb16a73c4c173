#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydsim/analytics.hpp"
#include "rydsim/cluster_model.hpp"
#include "rydsim/ladder_eom.hpp"
#include "rydsim/lattice.hpp"

namespace rydsim {

enum class ModelKind { full, cluster, amplitude_ladder };

struct InitialStateSpec {
    enum class Kind { cluster, gaussian, rung, ground };
    Kind kind = Kind::cluster;
    int j1 = 0, j2 = 0;                          // cluster
    double c0 = 0.0, k0 = 0.0, sigma = 0.0;      // gaussian
    int r0 = 0;                                  // gaussian
    int m0 = 0;                                  // rung
};

struct AnalysisSpec {
    std::vector<std::pair<double, double>> fit_windows;
    std::optional<std::pair<double, double>> revival_window;
    std::optional<std::pair<double, double>> slope_window; // late N(t) growth rate
};

struct LadderSpec {
    double k_over_pi = 0.0;
    LadderVariant variant = LadderVariant::detuned;
    int m_margin = 20; // window half-width beyond the ballistic reach 4*Omega0*t_end
};

struct ExperimentConfig {
    ModelKind model = ModelKind::cluster;
    LatticeParams lattice{100, 5.0, 6, Boundary::periodic};
    DriveParams drive{1.0, 5.0867};
    IntegratorParams integrator{2e-4, 60.0, 100};
    InitialStateSpec initial_state;
    HoppingConvention hopping = HoppingConvention::projector_derived;
    LadderSpec ladder;
    AnalysisSpec analysis;
    std::string output_dir;
    std::string preset;      // name when loaded from the preset table
    bool long_run = false;   // minutes-scale full-model figure runs
    bool nonstandard_dt = false; // dt overridden away from the preset value
    double seam_abort_threshold = 0.0; // abort when seam occupancy exceeds; 0 = report only
};

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

// Resolve a preset name or a JSON config file path.
ExperimentConfig load_config(const std::string& path_or_preset);

// Reassign one field through its dotted JSON path, e.g. "drive.omega=5.2"
// or "initial_state.k0=0". The value is parsed as JSON when possible.
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct RunResult {
    TimeSeries series;
    nlohmann::json manifest;
    nlohmann::json fits;
};

struct RunOptions {
    int threads = 0;                 // 0 = library default
    std::string output_dir_override; // wins over cfg.output_dir when nonempty
};

// Evolve per the config and post-process. Writes density.csv, scalars.csv,
// manifest.json and fits.json into the output directory (when one is set).
// On NumericalAbort the manifest is still written, flagged, and the abort
// rethrown.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct CrossValidateConfig {
    int n_sites = 14;
    int j1 = 6, j2 = 9;
    double v0 = 5.0;
    int alpha = 6;
    // the default drive amplitude keeps the high-frequency premise
    // omega >> omega0 honest at N = 14: the reversible far-field dressing
    // alone puts (N - r0 - 2) sin^2(omega0 / (2 omega)) of weight outside
    // the cluster subspace at the drive extrema
    double omega0 = 0.5;
    double omega = 5.0867;
    double dt = 4e-4;
    double t_end = 3.0;
    int sample_stride = 50;
    HoppingConvention convention = HoppingConvention::projector_derived;
    std::string output_dir;
};

struct CrossValidationReport {
    double max_density_discrepancy; // max over samples and sites
    double max_leakage;             // full-model weight outside single-cluster states
    std::vector<double> times;
    std::vector<double> discrepancy; // per sample
    std::vector<double> leakage;     // per sample
};

// Evolves the same cluster initial state under the full model and the
// effective model (projector_derived only) and compares densities.
CrossValidationReport cross_validate(const CrossValidateConfig& cfg);

nlohmann::json cross_validation_to_json(const CrossValidateConfig& cfg,
                                        const CrossValidationReport& rep);

} // namespace rydsim
