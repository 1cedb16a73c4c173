#include <benchmark/benchmark.h>

#include <random>

#include "rydsim/full_model.hpp"

using namespace rydsim;

namespace {

FullState random_full_state(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    FullState s{n, cvec(std::size_t{1} << n)};
    double norm2 = 0.0;
    for (cplx& a : s.amplitudes) {
        a = cplx(nd(gen), nd(gen));
        norm2 += std::norm(a);
    }
    for (cplx& a : s.amplitudes) a /= std::sqrt(norm2);
    return s;
}

} // namespace

static void BM_FullHamiltonianApply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const LatticeParams p(n, 5.0);
    const DriveParams d(1.0, 5.0867);
    const DiagonalInteraction diag = build_diagonal(p);
    FullState in = random_full_state(n, 42), out;
    double t = 0.0;
    for (auto _ : state) {
        apply_full_hamiltonian(in, t, p, d, diag, out);
        benchmark::DoNotOptimize(out.amplitudes.data());
        t += 4e-4;
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_FullHamiltonianApply)->DenseRange(12, 20, 2)->Unit(benchmark::kMicrosecond);

static void BM_BuildDiagonal(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const LatticeParams p(n, 5.0);
    for (auto _ : state) {
        DiagonalInteraction diag = build_diagonal(p);
        benchmark::DoNotOptimize(diag.energies.data());
    }
}
BENCHMARK(BM_BuildDiagonal)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);
