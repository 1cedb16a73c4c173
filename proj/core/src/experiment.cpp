#include "rydsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "rydsim/errors.hpp"
#include "rydsim/full_model.hpp"
#include "rydsim/integrate.hpp"
#include "rydsim/special.hpp"
#include "rydsim/version.hpp"

using nlohmann::json;

namespace rydsim {

// ---------------------------------------------------------------------------
// enum names

namespace {

std::string model_name(ModelKind m) {
    switch (m) {
        case ModelKind::full: return "full";
        case ModelKind::cluster: return "cluster";
        case ModelKind::amplitude_ladder: return "amplitude_ladder";
    }
    return "?";
}

ModelKind model_from(const std::string& s) {
    if (s == "full") return ModelKind::full;
    if (s == "cluster") return ModelKind::cluster;
    if (s == "amplitude_ladder") return ModelKind::amplitude_ladder;
    throw ConfigError("unknown model '" + s + "'");
}

std::string boundary_name(Boundary b) {
    return b == Boundary::periodic ? "periodic" : "open";
}

Boundary boundary_from(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "open") return Boundary::open;
    throw ConfigError("unknown boundary '" + s + "'");
}

std::string convention_name(HoppingConvention c) {
    return c == HoppingConvention::paper_verbatim ? "paper_verbatim" : "projector_derived";
}

HoppingConvention convention_from(const std::string& s) {
    if (s == "paper_verbatim") return HoppingConvention::paper_verbatim;
    if (s == "projector_derived") return HoppingConvention::projector_derived;
    throw ConfigError("unknown hopping_convention '" + s + "'");
}

std::string variant_name(LadderVariant v) {
    switch (v) {
        case LadderVariant::full: return "full";
        case LadderVariant::rwa: return "rwa";
        case LadderVariant::resonant: return "resonant";
        case LadderVariant::detuned: return "detuned";
    }
    return "?";
}

LadderVariant variant_from(const std::string& s) {
    if (s == "full") return LadderVariant::full;
    if (s == "rwa") return LadderVariant::rwa;
    if (s == "resonant") return LadderVariant::resonant;
    if (s == "detuned") return LadderVariant::detuned;
    throw ConfigError("unknown ladder variant '" + s + "'");
}

std::string state_kind_name(InitialStateSpec::Kind k) {
    switch (k) {
        case InitialStateSpec::Kind::cluster: return "cluster";
        case InitialStateSpec::Kind::gaussian: return "gaussian";
        case InitialStateSpec::Kind::rung: return "rung";
        case InitialStateSpec::Kind::ground: return "ground";
    }
    return "?";
}

void require_keys(const json& j, const char* where,
                  std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw ConfigError(std::string(where) + ": unknown field '" + it.key() + "'");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// config <-> json

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["model"] = model_name(cfg.model);
    j["lattice"] = {{"n_sites", cfg.lattice.n_sites},
                    {"v0", cfg.lattice.v0},
                    {"alpha", cfg.lattice.alpha},
                    {"boundary", boundary_name(cfg.lattice.boundary)}};
    j["drive"] = {{"omega0", cfg.drive.omega0}, {"omega", cfg.drive.omega}};
    j["integrator"] = {{"dt", cfg.integrator.dt},
                       {"t_end", cfg.integrator.t_end},
                       {"sample_stride", cfg.integrator.sample_stride}};
    json init;
    init["type"] = state_kind_name(cfg.initial_state.kind);
    switch (cfg.initial_state.kind) {
        case InitialStateSpec::Kind::cluster:
            init["j1"] = cfg.initial_state.j1;
            init["j2"] = cfg.initial_state.j2;
            break;
        case InitialStateSpec::Kind::gaussian:
            init["c0"] = cfg.initial_state.c0;
            init["k0"] = cfg.initial_state.k0;
            init["sigma"] = cfg.initial_state.sigma;
            init["r0"] = cfg.initial_state.r0;
            break;
        case InitialStateSpec::Kind::rung:
            init["m0"] = cfg.initial_state.m0;
            break;
        case InitialStateSpec::Kind::ground:
            break;
    }
    j["initial_state"] = init;
    j["hopping_convention"] = convention_name(cfg.hopping);
    if (cfg.model == ModelKind::amplitude_ladder)
        j["ladder"] = {{"k_over_pi", cfg.ladder.k_over_pi},
                       {"variant", variant_name(cfg.ladder.variant)},
                       {"m_margin", cfg.ladder.m_margin}};
    json an = json::object();
    if (!cfg.analysis.fit_windows.empty()) {
        json w = json::array();
        for (auto& [lo, hi] : cfg.analysis.fit_windows) w.push_back({lo, hi});
        an["fit_windows"] = w;
    }
    if (cfg.analysis.revival_window)
        an["revival_window"] = {cfg.analysis.revival_window->first,
                                cfg.analysis.revival_window->second};
    if (cfg.analysis.slope_window)
        an["slope_window"] = {cfg.analysis.slope_window->first,
                              cfg.analysis.slope_window->second};
    j["analysis"] = an;
    j["output_dir"] = cfg.output_dir;
    j["seam_abort_threshold"] = cfg.seam_abort_threshold;
    if (cfg.long_run) j["long_run"] = true;
    return j;
}

namespace {

void validate_compat(const ExperimentConfig& cfg) {
    using K = InitialStateSpec::Kind;
    const K k = cfg.initial_state.kind;
    switch (cfg.model) {
        case ModelKind::full:
            if (k == K::rung)
                throw ConfigError("initial_state 'rung' requires model amplitude_ladder");
            break;
        case ModelKind::cluster:
            if (k != K::cluster && k != K::gaussian)
                throw ConfigError("cluster model accepts cluster or gaussian initial states");
            break;
        case ModelKind::amplitude_ladder:
            if (k != K::rung)
                throw ConfigError("amplitude_ladder model requires a rung initial state");
            break;
    }
    const int n = cfg.lattice.n_sites;
    if (k == K::cluster) {
        if (cfg.initial_state.j1 < 1 || cfg.initial_state.j2 > n ||
            cfg.initial_state.j1 > cfg.initial_state.j2)
            throw ConfigError("cluster initial state needs 1 <= j1 <= j2 <= N");
        if (cfg.model == ModelKind::cluster &&
            cfg.initial_state.j2 - cfg.initial_state.j1 + 1 > n - 1)
            throw ConfigError("cluster model requires cluster size <= N-1");
    }
    if (k == K::gaussian) {
        if (!(cfg.initial_state.sigma > 0.0))
            throw ConfigError("gaussian initial state needs sigma > 0");
        if (cfg.initial_state.r0 < 1 || cfg.initial_state.r0 > n - 1)
            throw ConfigError("gaussian initial state needs 1 <= r0 <= N-1");
    }
    if (k == K::rung && cfg.initial_state.m0 < 2)
        throw ConfigError("rung initial state needs m0 >= 2");
}

} // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    require_keys(j, "config",
                 {"model", "lattice", "drive", "integrator", "initial_state",
                  "hopping_convention", "ladder", "analysis", "output_dir",
                  "seam_abort_threshold", "long_run"});
    try {
        cfg.model = model_from(j.at("model").get<std::string>());
        const json& l = j.at("lattice");
        require_keys(l, "lattice", {"n_sites", "v0", "alpha", "boundary"});
        cfg.lattice = LatticeParams(l.at("n_sites").get<int>(), l.at("v0").get<double>(),
                                    l.value("alpha", 6),
                                    boundary_from(l.value("boundary", "periodic")));
        const json& d = j.at("drive");
        require_keys(d, "drive", {"omega0", "omega"});
        cfg.drive = DriveParams(d.at("omega0").get<double>(), d.at("omega").get<double>());
        const json& ip = j.at("integrator");
        require_keys(ip, "integrator", {"dt", "t_end", "sample_stride"});
        cfg.integrator = IntegratorParams(ip.at("dt").get<double>(),
                                          ip.at("t_end").get<double>(),
                                          ip.value("sample_stride", 1));
        const json& is = j.at("initial_state");
        require_keys(is, "initial_state", {"type", "j1", "j2", "c0", "k0", "sigma", "r0", "m0"});
        const std::string kind = is.at("type").get<std::string>();
        if (kind == "cluster") {
            cfg.initial_state.kind = InitialStateSpec::Kind::cluster;
            cfg.initial_state.j1 = is.at("j1").get<int>();
            cfg.initial_state.j2 = is.at("j2").get<int>();
        } else if (kind == "gaussian") {
            cfg.initial_state.kind = InitialStateSpec::Kind::gaussian;
            cfg.initial_state.c0 = is.at("c0").get<double>();
            cfg.initial_state.k0 = is.at("k0").get<double>();
            cfg.initial_state.sigma = is.at("sigma").get<double>();
            cfg.initial_state.r0 = is.at("r0").get<int>();
        } else if (kind == "rung") {
            cfg.initial_state.kind = InitialStateSpec::Kind::rung;
            cfg.initial_state.m0 = is.at("m0").get<int>();
        } else if (kind == "ground") {
            cfg.initial_state.kind = InitialStateSpec::Kind::ground;
        } else {
            throw ConfigError("unknown initial_state type '" + kind + "'");
        }
        cfg.hopping = convention_from(j.value("hopping_convention", "projector_derived"));
        if (j.contains("ladder")) {
            const json& la = j.at("ladder");
            require_keys(la, "ladder", {"k_over_pi", "variant", "m_margin"});
            cfg.ladder.k_over_pi = la.value("k_over_pi", 0.0);
            cfg.ladder.variant = variant_from(la.value("variant", "detuned"));
            cfg.ladder.m_margin = la.value("m_margin", 20);
        }
        if (j.contains("analysis")) {
            const json& an = j.at("analysis");
            require_keys(an, "analysis", {"fit_windows", "revival_window", "slope_window"});
            if (an.contains("fit_windows"))
                for (const auto& w : an.at("fit_windows"))
                    cfg.analysis.fit_windows.emplace_back(w.at(0).get<double>(),
                                                          w.at(1).get<double>());
            if (an.contains("revival_window"))
                cfg.analysis.revival_window = {an.at("revival_window").at(0).get<double>(),
                                               an.at("revival_window").at(1).get<double>()};
            if (an.contains("slope_window"))
                cfg.analysis.slope_window = {an.at("slope_window").at(0).get<double>(),
                                             an.at("slope_window").at(1).get<double>()};
        }
        cfg.output_dir = j.value("output_dir", "");
        cfg.seam_abort_threshold = j.value("seam_abort_threshold", 0.0);
        cfg.long_run = j.value("long_run", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
    validate_compat(cfg);
    return cfg;
}

// ---------------------------------------------------------------------------
// presets (reference figure parameter sets; the cluster-model runs use the
// projector_derived wall-move coefficient throughout)

namespace {

ExperimentConfig base_cluster_preset() {
    ExperimentConfig cfg;
    cfg.model = ModelKind::cluster;
    cfg.lattice = LatticeParams(100, 5.0, 6, Boundary::periodic);
    cfg.drive = DriveParams(1.0, 5.0867);
    cfg.integrator = IntegratorParams(2e-4, 60.0, 100); // sample every 0.02
    cfg.hopping = HoppingConvention::projector_derived;
    return cfg;
}

ExperimentConfig base_full_preset() {
    ExperimentConfig cfg;
    cfg.model = ModelKind::full;
    cfg.lattice = LatticeParams(20, 5.0, 6, Boundary::periodic);
    cfg.drive = DriveParams(1.0, 5.0867);
    cfg.integrator = IntegratorParams(4e-4, 15.0, 50);
    cfg.hopping = HoppingConvention::projector_derived;
    cfg.long_run = true;
    return cfg;
}

void set_gaussian(ExperimentConfig& cfg, double c0, double k0, double sigma, int r0) {
    cfg.initial_state.kind = InitialStateSpec::Kind::gaussian;
    cfg.initial_state.c0 = c0;
    cfg.initial_state.k0 = k0;
    cfg.initial_state.sigma = sigma;
    cfg.initial_state.r0 = r0;
}

void set_cluster(ExperimentConfig& cfg, int j1, int j2) {
    cfg.initial_state.kind = InitialStateSpec::Kind::cluster;
    cfg.initial_state.j1 = j1;
    cfg.initial_state.j2 = j2;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig2d",
            "fig4a", "fig4b", "fig4c", "fig4d"};
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "fig1b") {
        cfg = base_full_preset();
        set_cluster(cfg, 9, 12);
    } else if (name == "fig1c") {
        cfg = base_full_preset();
        cfg.drive = DriveParams(1.0, 5.2867);
        set_gaussian(cfg, 10.5, M_PI, 2.0, 4);
    } else if (name == "fig2a" || name == "fig2b" || name == "fig2c" || name == "fig2d") {
        cfg = base_cluster_preset();
        if (name == "fig2a") set_cluster(cfg, 46, 55);
        if (name == "fig2b") set_gaussian(cfg, 50.5, 0.0, 4.0, 10);
        if (name == "fig2c") set_gaussian(cfg, 50.5, M_PI / 2.0, 4.0, 10);
        if (name == "fig2d") set_gaussian(cfg, 50.5, M_PI, 4.0, 10);
        if (name == "fig2d")
            cfg.analysis.fit_windows = {{2.0, 40.0}};
        else
            cfg.analysis.fit_windows = {{2.0, 12.0}, {25.0, 60.0}};
        cfg.analysis.slope_window = {{20.0, 60.0}};
    } else if (name == "fig4a" || name == "fig4b" || name == "fig4c" || name == "fig4d") {
        cfg = base_cluster_preset();
        cfg.drive = DriveParams(1.0, 5.1367);
        cfg.integrator = IntegratorParams(2e-4, 150.0, 100);
        if (name == "fig4a") set_cluster(cfg, 46, 55);
        if (name == "fig4b") set_gaussian(cfg, 50.5, 0.0, 4.0, 10);
        if (name == "fig4c") set_gaussian(cfg, 50.5, M_PI / 2.0, 4.0, 10);
        if (name == "fig4d") set_gaussian(cfg, 50.5, M_PI, 4.0, 10);
        cfg.analysis.revival_window = {{100.0, 150.0}};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    cfg.preset = name;
    cfg.output_dir = "runs/" + name;
    validate_compat(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path_or_preset) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), path_or_preset) != names.end())
        return preset_config(path_or_preset);
    std::ifstream in(path_or_preset);
    if (!in)
        throw ConfigError("'" + path_or_preset + "' is neither a preset nor a readable file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("failed to parse '" + path_or_preset + "': " + e.what());
    }
    return config_from_json(j);
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
    json j = config_to_json(cfg);
    json* node = &j;
    std::string rest = key, head;
    while (true) {
        const auto dot = rest.find('.');
        head = rest.substr(0, dot);
        if (dot == std::string::npos) break;
        rest = rest.substr(dot + 1);
        if (!node->contains(head))
            (*node)[head] = json::object();
        node = &(*node)[head];
        if (!node->is_object())
            throw ConfigError("override path '" + key + "' does not name a field");
    }
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value; // plain string
    const double old_dt = cfg.integrator.dt;
    (*node)[head] = v;
    ExperimentConfig next = config_from_json(j);
    next.preset = cfg.preset;
    next.nonstandard_dt =
        cfg.nonstandard_dt || (!cfg.preset.empty() && next.integrator.dt != old_dt);
    cfg = next;
}

// ---------------------------------------------------------------------------
// observable recording

namespace {

struct Recorder {
    TimeSeries series;
    double norm_drift_max = 0.0;
    double seam_occupancy_max = 0.0;
    double sigma0 = 0.0;
    bool first = true;
    int label_origin = 1; // first site (or rung) index of the profile columns

    void add(double t, std::vector<double> profile, double norm2, double autoc,
             double seam, double x0 = 1.0) {
        double total = 0.0;
        for (double v : profile) total += v;
        double sig = 0.0;
        if (total > 0.0) sig = density_variance(profile, x0);
        if (first) {
            sigma0 = sig;
            first = false;
        }
        series.times.push_back(t);
        series.density_profiles.push_back(std::move(profile));
        series.sigma.push_back(sig);
        series.delta_sigma.push_back(sig - sigma0);
        series.total_density.push_back(total);
        series.autocorr.push_back(autoc);
        norm_drift_max = std::max(norm_drift_max, std::fabs(norm2 - 1.0));
        seam_occupancy_max = std::max(seam_occupancy_max, seam);
    }
};

// ---------------------------------------------------------------------------
// periodic (torus) cluster evolution in momentum blocks
//
// The ring has no seam for the walls: configurations may wrap, which is what
// keeps the k0 = pi runs conserving and the late-time spreading free of
// artificial reflections. The state is evolved as N momentum blocks
// T_m(r), k = 2 pi m / N, in the interaction picture of the diagonal U(r):
// the remaining generator is a pure hopping term of norm ~ 4 Omega0, so the
// norm drift of fixed-step RK4 is negligible at the production step sizes.

struct TorusBlocks {
    int n = 0;                    // sites
    int rdim = 0;                 // N-1 cluster sizes
    std::vector<double> u;        // U(r), index r-1
    std::vector<double> cos_half; // cos(pi m / N), m = 0..N-1
    std::vector<cplx> tab;        // e^{-i pi nu / N}, nu = 0..2N-1
};

TorusBlocks make_torus(const LatticeParams& p) {
    TorusBlocks tb;
    tb.n = p.n_sites;
    tb.rdim = p.n_sites - 1;
    const SkewPotential sp = build_skew_potential(p);
    tb.u.assign(tb.rdim, 0.0);
    for (int r = 1; r <= tb.rdim; ++r) tb.u[r - 1] = sp.values[r];
    tb.cos_half.resize(tb.n);
    for (int m = 0; m < tb.n; ++m)
        tb.cos_half[m] = cospi(static_cast<double>(m) / tb.n);
    tb.tab.resize(2 * tb.n);
    for (int nu = 0; nu < 2 * tb.n; ++nu)
        tb.tab[nu] = std::polar(1.0, -M_PI * nu / tb.n);
    return tb;
}

// T_m(r) = (1/sqrt(N)) sum_j1 e^{-i k c} psi(j1, r), m = 0..N-1
cvec torus_blocks_from_cluster(const TorusBlocks& tb, const ClusterState& s) {
    const int n = tb.n;
    cvec t(static_cast<std::size_t>(n) * tb.rdim, cplx(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m)
        for (int r = 1; r <= tb.rdim; ++r) {
            const std::size_t off = cluster_offset(n, r);
            cplx acc(0.0, 0.0);
            for (int j1 = 1; j1 <= n - r + 1; ++j1) {
                const std::int64_t nu = (static_cast<std::int64_t>(m) * (2 * j1 + r - 1)) % (2 * n);
                acc += tb.tab[nu] * s.amplitudes[off + (j1 - 1)];
            }
            t[static_cast<std::size_t>(m) * tb.rdim + (r - 1)] = scale * acc;
        }
    return t;
}

// Split re/im workspace for one momentum block (vector-friendly kernels).
struct BlockWork {
    std::vector<double> yr, yi, kr, ki, ar, ai, tr, ti;
    explicit BlockWork(int rdim)
        : yr(rdim), yi(rdim), kr(rdim), ki(rdim), ar(rdim), ai(rdim), tr(rdim),
          ti(rdim) {}
};

// k = -i g [lo_r y_{r-1} + conj(lo_{r+1}) y_{r+1}] with the phases given as
// split re/im arrays on the caller's half-step grid.
inline void block_stage(int rdim, double g, const double* lr, const double* li,
                        const double* yr, const double* yi, double* kr, double* ki) {
    if (rdim == 1) {
        kr[0] = 0.0;
        ki[0] = 0.0;
        return;
    }
    kr[0] = g * (lr[1] * yi[1] - li[1] * yr[1]);
    ki[0] = -g * (lr[1] * yr[1] + li[1] * yi[1]);
    for (int i = 1; i + 1 < rdim; ++i) {
        const double are = lr[i] * yr[i - 1] - li[i] * yi[i - 1] +
                           lr[i + 1] * yr[i + 1] + li[i + 1] * yi[i + 1];
        const double aim = lr[i] * yi[i - 1] + li[i] * yr[i - 1] +
                           lr[i + 1] * yi[i + 1] - li[i + 1] * yr[i + 1];
        kr[i] = g * aim;
        ki[i] = -g * are;
    }
    const int e = rdim - 1;
    kr[e] = g * (lr[e] * yi[e - 1] + li[e] * yr[e - 1]);
    ki[e] = -g * (lr[e] * yr[e - 1] - li[e] * yi[e - 1]);
}

inline void block_rk4_step(int rdim, const double* g123, const double* lr0,
                           const double* li0, const double* lr1, const double* li1,
                           const double* lr2, const double* li2, BlockWork& w,
                           double h) {
    double *yr = w.yr.data(), *yi = w.yi.data();
    double *kr = w.kr.data(), *ki = w.ki.data();
    double *ar = w.ar.data(), *ai = w.ai.data();
    double *tr = w.tr.data(), *ti = w.ti.data();
    block_stage(rdim, g123[0], lr0, li0, yr, yi, kr, ki);
    for (int i = 0; i < rdim; ++i) {
        ar[i] = kr[i];
        ai[i] = ki[i];
        tr[i] = yr[i] + 0.5 * h * kr[i];
        ti[i] = yi[i] + 0.5 * h * ki[i];
    }
    block_stage(rdim, g123[1], lr1, li1, tr, ti, kr, ki);
    for (int i = 0; i < rdim; ++i) {
        ar[i] += 2.0 * kr[i];
        ai[i] += 2.0 * ki[i];
        tr[i] = yr[i] + 0.5 * h * kr[i];
        ti[i] = yi[i] + 0.5 * h * ki[i];
    }
    block_stage(rdim, g123[1], lr1, li1, tr, ti, kr, ki);
    for (int i = 0; i < rdim; ++i) {
        ar[i] += 2.0 * kr[i];
        ai[i] += 2.0 * ki[i];
        tr[i] = yr[i] + h * kr[i];
        ti[i] = yi[i] + h * ki[i];
    }
    block_stage(rdim, g123[2], lr2, li2, tr, ti, kr, ki);
    const double h6 = h / 6.0;
    for (int i = 0; i < rdim; ++i) {
        yr[i] += h6 * (ar[i] + kr[i]);
        yi[i] += h6 * (ai[i] + ki[i]);
    }
}

// Chunked evolution of all blocks: between sample points the blocks are
// independent, so each one is stepped through the whole chunk locally
// (cache resident, no synchronization); the interaction-picture hop phases
// on the half-step grid are shared by all blocks. sample_cb sees every
// sample_stride-th step plus the final one; norm drift > 1e-4 aborts like
// rk4_evolve.
void evolve_torus(const TorusBlocks& tb, const DriveParams& d, HoppingConvention conv,
                  const IntegratorParams& ip, cvec& blocks,
                  const std::function<void(double t, const cvec&)>& sample_cb) {
    const int n = tb.n, rdim = tb.rdim;
    const long n_steps = std::max<long>(1, std::llround(ip.t_end / ip.dt));
    const double h = ip.t_end / static_cast<double>(n_steps);
    const double conv_factor = conv == HoppingConvention::paper_verbatim ? 1.0 : 0.5;

    // e^{i dU_r h/2} advances the hop phases by half a step
    std::vector<cplx> rot_half(rdim, cplx(1.0, 0.0));
    std::vector<double> du(rdim, 0.0);
    for (int r = 2; r <= rdim; ++r) {
        du[r - 1] = tb.u[r - 1] - tb.u[r - 2];
        rot_half[r - 1] = std::polar(1.0, du[r - 1] * 0.5 * h);
    }

    const auto check_and_sample = [&](double t) {
        const double drift = std::fabs(norm_squared(blocks) - 1.0);
        if (drift > 1e-4) {
            std::ostringstream msg;
            msg << "cluster evolution: norm drift " << drift << " at t = " << t
                << " exceeds 1e-4";
            throw NumericalAbort(msg.str());
        }
        sample_cb(t, blocks);
    };

    check_and_sample(0.0);
    std::vector<double> gdrive;   // drive factor on the h/2 grid of one chunk
    std::vector<double> lre, lim; // hop phases on the same grid, [grid j][r]
    for (long step0 = 0; step0 < n_steps; step0 += ip.sample_stride) {
        const long chunk = std::min<long>(ip.sample_stride, n_steps - step0);
        const long grid = 2 * chunk + 1;
        gdrive.assign(grid, 0.0);
        for (long i = 0; i < grid; ++i)
            gdrive[i] = 2.0 * conv_factor *
                        drive_amplitude(d, (static_cast<double>(step0) + 0.5 * i) * h);
        const double t0 = static_cast<double>(step0) * h;
        lre.assign(static_cast<std::size_t>(grid) * rdim, 1.0);
        lim.assign(static_cast<std::size_t>(grid) * rdim, 0.0);
        for (int r = 1; r < rdim; ++r) {
            const cplx l0 = std::polar(1.0, du[r] * t0);
            lre[r] = l0.real();
            lim[r] = l0.imag();
        }
        for (long j = 1; j < grid; ++j) {
            const double* pr = &lre[(j - 1) * rdim];
            const double* pi = &lim[(j - 1) * rdim];
            double* cr = &lre[j * rdim];
            double* ci = &lim[j * rdim];
            for (int r = 1; r < rdim; ++r) {
                cr[r] = pr[r] * rot_half[r].real() - pi[r] * rot_half[r].imag();
                ci[r] = pr[r] * rot_half[r].imag() + pi[r] * rot_half[r].real();
            }
        }
#pragma omp parallel
        {
            BlockWork w(rdim);
#pragma omp for schedule(static)
            for (int m = 0; m < n; ++m) {
                cplx* y = blocks.data() + static_cast<std::size_t>(m) * rdim;
                for (int i = 0; i < rdim; ++i) {
                    w.yr[i] = y[i].real();
                    w.yi[i] = y[i].imag();
                }
                for (long s = 0; s < chunk; ++s) {
                    const double g123[3] = {tb.cos_half[m] * gdrive[2 * s],
                                            tb.cos_half[m] * gdrive[2 * s + 1],
                                            tb.cos_half[m] * gdrive[2 * s + 2]};
                    block_rk4_step(rdim, g123, &lre[(2 * s) * rdim], &lim[(2 * s) * rdim],
                                   &lre[(2 * s + 1) * rdim], &lim[(2 * s + 1) * rdim],
                                   &lre[(2 * s + 2) * rdim], &lim[(2 * s + 2) * rdim],
                                   w, h);
                }
                for (int i = 0; i < rdim; ++i) y[i] = cplx(w.yr[i], w.yi[i]);
            }
        }
        check_and_sample(static_cast<double>(step0 + chunk) * h);
    }
}

// physical torus amplitudes psi(j1, r), j1 = 1..N (j1 + r - 1 may wrap)
void torus_real_space(const TorusBlocks& tb, const cvec& blocks, double t,
                      std::vector<cplx>& psi) {
    const int n = tb.n, rdim = tb.rdim;
    psi.assign(static_cast<std::size_t>(n) * rdim, cplx(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> phys(blocks.size());
    for (int m = 0; m < n; ++m)
        for (int r = 1; r <= rdim; ++r) {
            const std::size_t i = static_cast<std::size_t>(m) * rdim + (r - 1);
            phys[i] = blocks[i] * std::polar(1.0, -tb.u[r - 1] * t);
        }
#pragma omp parallel for schedule(static)
    for (int j1 = 1; j1 <= n; ++j1)
        for (int r = 1; r <= rdim; ++r) {
            cplx acc(0.0, 0.0);
            for (int m = 0; m < n; ++m) {
                const std::int64_t nu = (static_cast<std::int64_t>(m) * (2 * j1 + r - 1)) % (2 * n);
                acc += std::conj(tb.tab[nu]) * phys[static_cast<std::size_t>(m) * rdim + (r - 1)];
            }
            psi[static_cast<std::size_t>(j1 - 1) * rdim + (r - 1)] = scale * acc;
        }
}

struct TorusObservables {
    std::vector<double> profile;
    double seam = 0.0; // weight on wrapped configurations
};

TorusObservables torus_density(const TorusBlocks& tb, const std::vector<cplx>& psi) {
    const int n = tb.n, rdim = tb.rdim;
    TorusObservables obs;
    std::vector<double> diff(n + 1, 0.0);
    for (int j1 = 1; j1 <= n; ++j1)
        for (int r = 1; r <= rdim; ++r) {
            const double w = std::norm(psi[static_cast<std::size_t>(j1 - 1) * rdim + (r - 1)]);
            if (w == 0.0) continue;
            const int j2 = j1 + r - 1;
            if (j2 <= n) {
                diff[j1 - 1] += w;
                diff[j2] -= w;
            } else {
                obs.seam += w;
                diff[j1 - 1] += w;
                diff[n] -= w;
                diff[0] += w;
                diff[j2 - n] -= w;
            }
        }
    obs.profile.resize(n);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        acc += diff[j];
        obs.profile[j] = acc;
    }
    return obs;
}

// inner product in block space equals the torus-space overlap
cplx torus_overlap(const TorusBlocks& tb, const cvec& a_phys_t0, const cvec& b_blocks,
                   double t) {
    cplx ov(0.0, 0.0);
    const int rdim = tb.rdim;
    for (int m = 0; m < tb.n; ++m)
        for (int r = 1; r <= rdim; ++r) {
            const std::size_t i = static_cast<std::size_t>(m) * rdim + (r - 1);
            ov += std::conj(a_phys_t0[i]) * (b_blocks[i] * std::polar(1.0, -tb.u[r - 1] * t));
        }
    return ov;
}

// ---------------------------------------------------------------------------
// model drivers

ClusterState initial_cluster_state(const ExperimentConfig& cfg) {
    switch (cfg.initial_state.kind) {
        case InitialStateSpec::Kind::cluster:
            return build_cluster_state(cfg.lattice, cfg.initial_state.j1,
                                       cfg.initial_state.j2);
        case InitialStateSpec::Kind::gaussian:
            return build_gaussian_cluster(cfg.lattice, cfg.initial_state.c0,
                                          cfg.initial_state.k0, cfg.initial_state.sigma,
                                          cfg.initial_state.r0);
        default:
            throw ConfigError("initial state incompatible with a cluster-basis run");
    }
}

void run_cluster_model(const ExperimentConfig& cfg, Recorder& rec) {
    const TorusBlocks tb = make_torus(cfg.lattice);
    const ClusterState psi0 = initial_cluster_state(cfg);
    cvec blocks = torus_blocks_from_cluster(tb, psi0);
    const cvec blocks0 = blocks; // t = 0, interaction picture == physical
    std::vector<cplx> psi;
    const auto observe = [&](double t, const cvec& y) {
        torus_real_space(tb, y, t, psi);
        TorusObservables obs = torus_density(tb, psi);
        const double autoc = std::norm(torus_overlap(tb, blocks0, y, t));
        if (cfg.seam_abort_threshold > 0.0 && obs.seam > cfg.seam_abort_threshold) {
            std::ostringstream msg;
            msg << "cluster run: seam occupancy " << obs.seam << " at t = " << t
                << " exceeds threshold " << cfg.seam_abort_threshold;
            throw NumericalAbort(msg.str());
        }
        rec.add(t, std::move(obs.profile), norm_squared(y), autoc, obs.seam);
    };
    evolve_torus(tb, cfg.drive, cfg.hopping, cfg.integrator, blocks, observe);
}

void run_full_model(const ExperimentConfig& cfg, Recorder& rec) {
    FullState psi0;
    switch (cfg.initial_state.kind) {
        case InitialStateSpec::Kind::ground:
            psi0 = build_ground_full(cfg.lattice);
            break;
        case InitialStateSpec::Kind::cluster:
            psi0 = build_cluster_full(cfg.lattice, cfg.initial_state.j1,
                                      cfg.initial_state.j2);
            break;
        case InitialStateSpec::Kind::gaussian:
            psi0 = embed_cluster_in_full(initial_cluster_state(cfg), cfg.lattice);
            break;
        default:
            throw ConfigError("initial state incompatible with a full-model run");
    }
    DiagonalInteraction diag = build_diagonal(cfg.lattice);
    // constant energy shift to center the populated spectrum (global phase only)
    double shift = 0.0;
    for (std::size_t b = 0; b < psi0.amplitudes.size(); ++b)
        shift += std::norm(psi0.amplitudes[b]) * diag.energies[b];
    DiagonalInteraction shifted = diag;
    for (double& e : shifted.energies) e -= shift;

    const cvec amps0 = psi0.amplitudes;
    const ApplyHFn apply = [&](const cvec& in, double t, cvec& out) {
        apply_full_hamiltonian(in, t, cfg.lattice, cfg.drive, shifted, out);
    };
    const Observer observe = [&](long, double t, const cvec& y) {
        FullState tmp{cfg.lattice.n_sites, y};
        std::vector<double> profile = rydberg_density_full(tmp);
        cplx ov(0.0, 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) ov += std::conj(amps0[i]) * y[i];
        rec.add(t, std::move(profile), norm_squared(y), std::norm(ov), 0.0);
    };
    rk4_evolve(apply, psi0.amplitudes, cfg.integrator, observe);
}

void run_ladder_model(const ExperimentConfig& cfg, Recorder& rec) {
    const int m0 = cfg.initial_state.m0;
    const int reach = static_cast<int>(std::ceil(4.0 * cfg.drive.omega0 *
                                                 cfg.integrator.t_end)) +
                      cfg.ladder.m_margin;
    const int m_min = std::max(2, m0 - reach);
    const int m_max = m0 + reach;
    AmplitudeLadder l = make_amplitude_ladder(m_min, m_max, cfg.ladder.k_over_pi,
                                              cfg.lattice, cfg.drive);
    if (m0 < l.m_min || m0 > l.m_max)
        throw ConfigError("rung m0 outside the ladder window");
    l.rungs[m0 - l.m_min] = cplx(1.0, 0.0);
    rec.label_origin = l.m_min;
    const cvec rungs0 = l.rungs;
    const Observer observe = [&](long, double t, const cvec& y) {
        std::vector<double> profile(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) profile[i] = std::norm(y[i]);
        cplx ov(0.0, 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) ov += std::conj(rungs0[i]) * y[i];
        rec.add(t, std::move(profile), norm_squared(y), std::norm(ov), 0.0,
                static_cast<double>(l.m_min));
    };
    evolve_ladder(l, cfg.drive, cfg.ladder.variant, cfg.integrator, observe);
}

// ---------------------------------------------------------------------------
// fits and output files

json compute_fits(const ExperimentConfig& cfg, const TimeSeries& s) {
    json fits;
    json fit_list = json::array();
    std::vector<PowerLawFit> ok;
    for (const auto& [lo, hi] : cfg.analysis.fit_windows) {
        json f;
        f["window"] = {lo, hi};
        try {
            const PowerLawFit fit = fit_power_law(s.times, s.delta_sigma, lo, hi);
            f["beta"] = fit.beta;
            f["intercept"] = fit.intercept;
            f["residual"] = fit.residual;
            f["n_samples"] = fit.n_samples;
            ok.push_back(fit);
        } catch (const std::exception& e) {
            f["error"] = e.what();
        }
        fit_list.push_back(f);
    }
    if (!fit_list.empty()) fits["power_law"] = fit_list;
    if (ok.size() >= 2)
        fits["kink_time"] = fit_crossing_time(ok[0], ok[1]);
    if (cfg.analysis.revival_window) {
        const auto [lo, hi] = *cfg.analysis.revival_window;
        json r;
        r["window"] = {lo, hi};
        try {
            const RevivalPeak peak = find_revival_period(s.times, s.autocorr, lo, hi);
            r["t_peak"] = peak.t_peak;
            r["value"] = peak.value;
            r["reliable"] = peak.reliable;
        } catch (const std::exception& e) {
            r["error"] = e.what();
        }
        fits["revival"] = r;
    }
    if (!s.total_density.empty()) {
        json td;
        td["initial"] = s.total_density.front();
        td["final"] = s.total_density.back();
        double max_rel = 0.0;
        for (double v : s.total_density)
            max_rel = std::max(max_rel, std::fabs(v / s.total_density.front() - 1.0));
        td["max_rel_deviation"] = max_rel;
        if (cfg.analysis.slope_window) {
            const auto [lo, hi] = *cfg.analysis.slope_window;
            if (auto slope = linear_slope(s.times, s.total_density, lo, hi))
                td["late_slope"] = *slope;
        }
        fits["total_density"] = td;
    }
    return fits;
}

void write_csv(const std::string& path, const TimeSeries& s, ModelKind model,
               int label_origin) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "t");
    const std::size_t n = s.density_profiles.empty() ? 0 : s.density_profiles[0].size();
    for (std::size_t j = 0; j < n; ++j)
        std::fprintf(f, ",%s%d", model == ModelKind::amplitude_ladder ? "rung_" : "site_",
                     label_origin + static_cast<int>(j));
    std::fprintf(f, "\n");
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        std::fprintf(f, "%.17g", s.times[i]);
        for (double v : s.density_profiles[i]) std::fprintf(f, ",%.17g", v);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_scalars(const std::string& path, const TimeSeries& s) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "t,sigma,delta_sigma,total_density,autocorr\n");
    for (std::size_t i = 0; i < s.times.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.times[i], s.sigma[i],
                     s.delta_sigma[i], s.total_density[i], s.autocorr[i]);
    std::fclose(f);
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

int active_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
    const std::string out_dir =
        !opts.output_dir_override.empty() ? opts.output_dir_override : cfg.output_dir;

    Recorder rec;
    const auto t_start = std::chrono::steady_clock::now();
    bool aborted = false;
    std::string abort_reason;
    try {
        switch (cfg.model) {
            case ModelKind::cluster: run_cluster_model(cfg, rec); break;
            case ModelKind::full: run_full_model(cfg, rec); break;
            case ModelKind::amplitude_ladder: run_ladder_model(cfg, rec); break;
        }
    } catch (const NumericalAbort& e) {
        aborted = true;
        abort_reason = e.what();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    RunResult result;
    result.series = std::move(rec.series);
    result.fits = compute_fits(cfg, result.series);

    json manifest;
    manifest["code_version"] = version_string;
    manifest["preset"] = cfg.preset.empty() ? json() : json(cfg.preset);
    manifest["config"] = config_to_json(cfg);
    manifest["wall_time_seconds"] = wall;
    manifest["threads"] = active_threads();
    manifest["integrator_frame"] =
        cfg.model == ModelKind::cluster ? "interaction_picture_diagonal"
        : cfg.model == ModelKind::full  ? "shifted_diagonal"
                                        : "bare";
    manifest["norm_drift_max"] = rec.norm_drift_max;
    if (cfg.model == ModelKind::cluster)
        manifest["seam_occupancy_max"] = rec.seam_occupancy_max;
    else
        manifest["seam_occupancy_max"] = json();
    manifest["nonstandard_dt"] = cfg.nonstandard_dt;
    manifest["aborted"] = aborted;
    if (aborted) manifest["abort_reason"] = abort_reason;
    manifest["partial_outputs"] = aborted;
    manifest["fitted"] = result.fits;
    result.manifest = manifest;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_csv(out_dir + "/density.csv", result.series, cfg.model, rec.label_origin);
        write_scalars(out_dir + "/scalars.csv", result.series);
        write_json_file(out_dir + "/manifest.json", result.manifest);
        write_json_file(out_dir + "/fits.json", result.fits);
    }
    if (aborted) throw NumericalAbort(abort_reason);
    return result;
}

// ---------------------------------------------------------------------------
// full-model vs effective-model cross-validation

CrossValidationReport cross_validate(const CrossValidateConfig& cv) {
    if (cv.convention != HoppingConvention::projector_derived)
        throw ConfigError(
            "cross_validate: the effective side must use the projector_derived "
            "convention; paper_verbatim double-counts the wall-move matrix element");
    if (cv.n_sites > 16)
        throw ConfigError("cross_validate: full side capped at N = 16");
    const LatticeParams lattice(cv.n_sites, cv.v0, cv.alpha, Boundary::periodic);
    const DriveParams drive(cv.omega0, cv.omega);
    const IntegratorParams ip(cv.dt, cv.t_end, cv.sample_stride);
    if (cv.j2 - cv.j1 + 1 > cv.n_sites - 1)
        throw ConfigError("cross_validate: cluster size must be <= N-1");

    // effective side on the periodic cluster space
    const TorusBlocks tb = make_torus(lattice);
    cvec blocks = torus_blocks_from_cluster(tb, build_cluster_state(lattice, cv.j1, cv.j2));
    std::vector<std::vector<double>> cluster_profiles;
    std::vector<double> times;
    {
        std::vector<cplx> psi;
        const auto observe = [&](double t, const cvec& y) {
            torus_real_space(tb, y, t, psi);
            cluster_profiles.push_back(torus_density(tb, psi).profile);
            times.push_back(t);
        };
        evolve_torus(tb, drive, cv.convention, ip, blocks, observe);
    }

    // full side, matrix-free with the same step
    FullState psi0 = build_cluster_full(lattice, cv.j1, cv.j2);
    DiagonalInteraction diag = build_diagonal(lattice);
    double shift = 0.0;
    for (std::size_t b = 0; b < psi0.amplitudes.size(); ++b)
        shift += std::norm(psi0.amplitudes[b]) * diag.energies[b];
    for (double& e : diag.energies) e -= shift;

    // single cyclic runs of excited sites (any rotation, wrapped included)
    std::vector<std::uint64_t> cyclic_masks;
    for (int r = 1; r <= cv.n_sites - 1; ++r)
        for (int j1 = 1; j1 <= cv.n_sites; ++j1) {
            std::uint64_t m = 0;
            for (int s = 0; s < r; ++s)
                m |= std::uint64_t{1} << ((j1 - 1 + s) % cv.n_sites);
            cyclic_masks.push_back(m);
        }
    cyclic_masks.push_back((std::uint64_t{1} << cv.n_sites) - 1);
    std::sort(cyclic_masks.begin(), cyclic_masks.end());
    cyclic_masks.erase(std::unique(cyclic_masks.begin(), cyclic_masks.end()),
                       cyclic_masks.end());

    CrossValidationReport rep;
    rep.max_density_discrepancy = 0.0;
    rep.max_leakage = 0.0;
    std::size_t sample = 0;
    const ApplyHFn apply = [&](const cvec& in, double t, cvec& out) {
        apply_full_hamiltonian(in, t, lattice, drive, diag, out);
    };
    const Observer observe = [&](long, double t, const cvec& y) {
        FullState tmp{cv.n_sites, y};
        const std::vector<double> profile = rydberg_density_full(tmp);
        double disc = 0.0;
        const std::vector<double>& ref = cluster_profiles.at(sample);
        for (int j = 0; j < cv.n_sites; ++j)
            disc = std::max(disc, std::fabs(profile[j] - ref[j]));
        double inside = 0.0;
        for (std::uint64_t m : cyclic_masks) inside += std::norm(y[m]);
        const double leak = 1.0 - inside;
        rep.times.push_back(t);
        rep.discrepancy.push_back(disc);
        rep.leakage.push_back(leak);
        rep.max_density_discrepancy = std::max(rep.max_density_discrepancy, disc);
        rep.max_leakage = std::max(rep.max_leakage, leak);
        ++sample;
    };
    rk4_evolve(apply, psi0.amplitudes, ip, observe);
    return rep;
}

json cross_validation_to_json(const CrossValidateConfig& cv,
                              const CrossValidationReport& rep) {
    json j;
    j["code_version"] = version_string;
    j["config"] = {{"n_sites", cv.n_sites}, {"j1", cv.j1},     {"j2", cv.j2},
                   {"v0", cv.v0},           {"alpha", cv.alpha}, {"omega0", cv.omega0},
                   {"omega", cv.omega},     {"dt", cv.dt},     {"t_end", cv.t_end},
                   {"sample_stride", cv.sample_stride},
                   {"hopping_convention", convention_name(cv.convention)}};
    j["max_density_discrepancy"] = rep.max_density_discrepancy;
    j["max_leakage"] = rep.max_leakage;
    j["times"] = rep.times;
    j["discrepancy"] = rep.discrepancy;
    j["leakage"] = rep.leakage;
    return j;
}

} // namespace rydsim
