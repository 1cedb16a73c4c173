#include <benchmark/benchmark.h>

#include <random>

#include "rydsim/cluster_model.hpp"
#include "rydsim/experiment.hpp"

using namespace rydsim;

namespace {

ClusterState random_cluster(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    ClusterState s = make_cluster_state(LatticeParams(n, 5.0));
    double norm2 = 0.0;
    for (cplx& a : s.amplitudes) {
        a = cplx(nd(gen), nd(gen));
        norm2 += std::norm(a);
    }
    for (cplx& a : s.amplitudes) a /= std::sqrt(norm2);
    return s;
}

} // namespace

static void BM_EffectiveHamiltonianApply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const LatticeParams p(n, 5.0);
    const DriveParams d(1.0, 5.0867);
    const SkewPotential u = build_skew_potential(p);
    ClusterState in = random_cluster(n, 7), out;
    double t = 0.0;
    for (auto _ : state) {
        apply_effective_hamiltonian(in, t, p, d, HoppingConvention::projector_derived, u, out);
        benchmark::DoNotOptimize(out.amplitudes.data());
        t += 2e-4;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cluster_dim(n)));
}
BENCHMARK(BM_EffectiveHamiltonianApply)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

static void BM_MomentumDecompose(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ClusterState s = random_cluster(n, 11);
    for (auto _ : state) {
        auto blocks = momentum_decompose(s);
        benchmark::DoNotOptimize(blocks.data());
    }
}
BENCHMARK(BM_MomentumDecompose)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ClusterPresetStep(benchmark::State& state) {
    // one sampled chunk of the production pipeline (100 RK4 steps at N = 100)
    ExperimentConfig cfg = preset_config("fig2a");
    apply_override(cfg, "integrator.t_end", "0.02");
    apply_override(cfg, "analysis.fit_windows", "[]");
    cfg.output_dir.clear();
    for (auto _ : state) {
        RunResult r = run_experiment(cfg);
        benchmark::DoNotOptimize(r.series.times.data());
    }
}
BENCHMARK(BM_ClusterPresetStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
