#include <benchmark/benchmark.h>

#include "lnspdc/tags.hpp"

using namespace lnspdc;

static SourceConfig bench_source(double rate, double duration) {
    SourceConfig cfg;
    cfg.pair_rate_hz = rate;
    cfg.duration_s = duration;
    cfg.eta_s = cfg.eta_i = 0.4;
    cfg.dark_s_hz = cfg.dark_i_hz = 200.0;
    cfg.jitter_sigma_ps = 40.0;
    cfg.splitter = true;
    cfg.seed = 7;
    return cfg;
}

static void BM_SimulateTags(benchmark::State& state) {
    const auto cfg = bench_source(1e6, static_cast<double>(state.range(0)));
    std::size_t tags = 0;
    for (auto _ : state) {
        const auto stream = simulate_tags(cfg);
        tags = stream.records.size();
        benchmark::DoNotOptimize(stream.records.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(tags) * state.iterations());
}
BENCHMARK(BM_SimulateTags)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_CoincidenceHistogram(benchmark::State& state) {
    const auto stream = simulate_tags(bench_source(1e6, 2.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(coincidence_histogram(stream, 0, 1, 50, 40000).counts.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(stream.records.size()) * state.iterations());
}
BENCHMARK(BM_CoincidenceHistogram)->Unit(benchmark::kMillisecond);

static void BM_HeraldedG2(benchmark::State& state) {
    const auto stream = simulate_tags(bench_source(1e6, 1.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(heralded_g2(stream, 500, true, 100, 1).g2);
    }
}
BENCHMARK(BM_HeraldedG2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
