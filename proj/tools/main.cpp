// Command line driver: preset/config experiment runs, config validation and
// full-vs-effective cross-validation.
//
// Exit codes: 0 success, 2 config error, 3 numerical abort, 4 capacity error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rydsim/errors.hpp"
#include "rydsim/experiment.hpp"
#include "rydsim/version.hpp"

using namespace rydsim;

namespace {

int run_command(const std::string& preset, const std::string& config_file,
                const std::vector<std::string>& sets, const std::string& out_dir,
                int threads) {
    if (preset.empty() == config_file.empty())
        throw ConfigError("run: give exactly one of --preset or --config");
    ExperimentConfig cfg = load_config(preset.empty() ? config_file : preset);
    for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    RunOptions opts;
    opts.threads = threads;
    if (!out_dir.empty()) {
        opts.output_dir_override = out_dir;
    } else if (cfg.output_dir.empty()) {
        // file-based configs without an output_dir still produce artifacts
        opts.output_dir_override =
            "runs/" + std::filesystem::path(config_file).stem().string();
    }
    if (cfg.long_run)
        std::fprintf(stderr, "note: '%s' is a long full-model run (minutes to tens of minutes)\n",
                     cfg.preset.c_str());
    const RunResult result = run_experiment(cfg, opts);
    const std::string where =
        !opts.output_dir_override.empty() ? opts.output_dir_override : cfg.output_dir;
    std::printf("run complete: %zu samples, norm drift %.3g\n",
                result.series.times.size(),
                result.manifest.at("norm_drift_max").get<double>());
    std::printf("outputs in %s: density.csv scalars.csv manifest.json fits.json\n",
                where.c_str());
    std::printf("%s\n", result.fits.dump(2).c_str());
    return 0;
}

int validate_command(const std::string& config_file) {
    const ExperimentConfig cfg = load_config(config_file);
    std::printf("ok: %s\n", config_to_json(cfg).dump().c_str());
    return 0;
}

int cross_validate_command(const CrossValidateConfig& cv) {
    const CrossValidationReport rep = cross_validate(cv);
    std::printf("cross-validation N=%d cluster(%d,%d) t<=%g:\n", cv.n_sites, cv.j1,
                cv.j2, cv.t_end);
    std::printf("  max per-site density discrepancy: %.6f\n", rep.max_density_discrepancy);
    std::printf("  max leakage out of the cluster subspace: %.6f\n", rep.max_leakage);
    if (!cv.output_dir.empty()) {
        std::filesystem::create_directories(cv.output_dir);
        std::ofstream out(cv.output_dir + "/cross_validation.json");
        out << cross_validation_to_json(cv, rep).dump(2) << "\n";
        std::printf("  report: %s/cross_validation.json\n", cv.output_dir.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-cluster dynamics in a periodically driven Rydberg chain"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a preset or a JSON config");
    std::string preset, config_file, out_dir;
    std::vector<std::string> sets;
    int threads = 0;
    run->add_option("--preset", preset, "Preset name (see list-presets)");
    run->add_option("--config", config_file, "JSON config file");
    run->add_option("--set", sets, "Override a config field, e.g. drive.omega=5.2")
        ->take_all();
    run->add_option("--out", out_dir, "Output directory (default runs/<name>)");
    run->add_option("--threads", threads, "Worker threads for the state application");

    // validate
    auto* val = app.add_subcommand("validate", "Parse and validate a config file");
    std::string val_file;
    val->add_option("--config", val_file, "JSON config file")->required();

    // cross-validate
    auto* cross = app.add_subcommand(
        "cross-validate", "Compare full-model and effective-model densities");
    CrossValidateConfig cv;
    cross->add_option("--n-sites", cv.n_sites, "Lattice size (<= 16)");
    cross->add_option("--j1", cv.j1, "Left edge of the initial cluster");
    cross->add_option("--j2", cv.j2, "Right edge of the initial cluster");
    cross->add_option("--v0", cv.v0, "Interaction strength");
    cross->add_option("--alpha", cv.alpha, "Interaction exponent (3 or 6)");
    cross->add_option("--omega0", cv.omega0, "Drive amplitude");
    cross->add_option("--omega", cv.omega, "Drive frequency");
    cross->add_option("--dt", cv.dt, "Time step");
    cross->add_option("--t-end", cv.t_end, "Final time");
    cross->add_option("--stride", cv.sample_stride, "Sample stride in steps");
    cross->add_option("--out", cv.output_dir, "Directory for cross_validation.json");

    // list-presets
    auto* list = app.add_subcommand("list-presets", "List built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(preset, config_file, sets, out_dir, threads);
        if (*val) return validate_command(val_file);
        if (*cross) return cross_validate_command(cv);
        if (*list) {
            for (const std::string& name : preset_names()) std::printf("%s\n", name.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalAbort& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
