#include "telewell/telegraph.hpp"

#include <benchmark/benchmark.h>

using namespace telewell;

namespace {

const Simulator& reference_simulator() {
    static Simulator sim({PotentialSpec::reference_quartic(), VelocityPair(0.3, -0.3),
                          RatePair(1.0, 1.0), 17},
                         1);
    return sim;
}

} // namespace

static void BM_SamplePath(benchmark::State& state) {
    const Simulator& sim = reference_simulator();
    const double horizon = static_cast<double>(state.range(0));
    std::uint64_t p = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sim.sample_path(1.0, 0, horizon, p++));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(horizon));
}
BENCHMARK(BM_SamplePath)->Arg(10)->Arg(100);

static void BM_FirstPassage(benchmark::State& state) {
    const Simulator& sim = reference_simulator();
    std::uint64_t p = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sim.sample_first_passage(0.85, 1.0, 0, 1e4, p++));
}
BENCHMARK(BM_FirstPassage);

static void BM_ExitProbEstimate(benchmark::State& state) {
    const Simulator& sim = reference_simulator();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim.estimate_exit_prob(0.0, 0, state.range(0)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExitProbEstimate)->Arg(1000)->Arg(10000);
