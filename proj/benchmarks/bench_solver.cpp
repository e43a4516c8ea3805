#include <benchmark/benchmark.h>

#include "lnspdc/dispersion.hpp"
#include "lnspdc/mode_solver.hpp"

using namespace lnspdc;

static void BM_SellmeierIndex(benchmark::State& state) {
    const auto cat = MaterialCatalog::builtin();
    const auto& ln = cat.at("LN_extraordinary");
    double lam = 1.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ln.index(lam));
        lam = lam < 1.9 ? lam + 1e-6 : 1.2;
    }
}
BENCHMARK(BM_SellmeierIndex);

static void BM_FundamentalTE(benchmark::State& state) {
    const auto cat = MaterialCatalog::builtin();
    const auto g = reference_geometry();
    GridSpec grid;
    grid.dx_nm = grid.dy_nm = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fundamental_te(g, cat, 1.62, grid).n_eff);
    }
}
BENCHMARK(BM_FundamentalTE)->Arg(80)->Arg(40)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_SlabModes(benchmark::State& state) {
    const auto cat = MaterialCatalog::builtin();
    const double lam = 0.81;
    SlabStack stack{{cat.at("SiO2").index(lam), cat.at("LN_ordinary").index(lam), 1.0}, {0.435}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(slab_modes(stack, Polarization::TM, lam));
    }
}
BENCHMARK(BM_SlabModes)->Unit(benchmark::kMicrosecond);

static void BM_GvdEval(benchmark::State& state) {
    const auto cat = MaterialCatalog::builtin();
    GridSpec grid;
    grid.dx_nm = grid.dy_nm = 40.0;
    const auto curve = DispersionCurve::solve_te(reference_geometry(), cat, 1.5, 1.74, 0.03, grid, 1);
    double lam = 1.58;
    for (auto _ : state) {
        benchmark::DoNotOptimize(curve.gvd(lam));
        lam = lam < 1.66 ? lam + 1e-5 : 1.58;
    }
}
BENCHMARK(BM_GvdEval);

BENCHMARK_MAIN();
