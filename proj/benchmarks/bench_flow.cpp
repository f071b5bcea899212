#include "telewell/flow.hpp"

#include <benchmark/benchmark.h>

using namespace telewell;

namespace {

const FlowSystem& reference_system() {
    static FlowSystem fs(PotentialSpec::reference_quartic(), VelocityPair(0.3, -0.3),
                         RatePair(1.0, 1.0));
    return fs;
}

} // namespace

static void BM_PhiEval(benchmark::State& state) {
    const FlowSystem& fs = reference_system();
    const FlowMap& fm = fs.flow_map_at(0, 0.5);
    double y = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fm.phi(y));
        y = y < 1.0 ? y + 1e-4 : 0.2;
    }
}
BENCHMARK(BM_PhiEval);

static void BM_PhiInverse(benchmark::State& state) {
    const FlowSystem& fs = reference_system();
    const FlowMap& fm = fs.flow_map_at(0, 0.5);
    double s = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fm.phi_inverse(s, 0.5));
        s = s < 4.0 ? s + 1e-3 : -2.0;
    }
}
BENCHMARK(BM_PhiInverse);

static void BM_PatternStep(benchmark::State& state) {
    const FlowSystem& fs = reference_system();
    double x = 0.2;
    for (auto _ : state) {
        x = fs.pattern(0, 0.05, x);
        if (x > 1.1) x = 0.2;
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_PatternStep);

static void BM_FlowSystemBuild(benchmark::State& state) {
    for (auto _ : state) {
        FlowSystem fs(PotentialSpec::reference_quartic(), VelocityPair(0.3, -0.3),
                      RatePair(1.0, 1.0));
        benchmark::DoNotOptimize(fs);
    }
}
BENCHMARK(BM_FlowSystemBuild);

BENCHMARK_MAIN();
