#include "telewell/flow.hpp"
#include "telewell/invariant.hpp"
#include "telewell/passage.hpp"
#include "telewell/quadrature.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace telewell;

namespace {

const FlowSystem& reference_system() {
    static FlowSystem fs(PotentialSpec::reference_quartic(), VelocityPair(0.3, -0.3),
                         RatePair(1.0, 1.0));
    return fs;
}

} // namespace

static void BM_TanhSinhSqrt(benchmark::State& state) {
    Integrand1D f;
    f.a = 0.0;
    f.b = 1.0;
    f.at_a = EndpointBehavior::power(-0.5);
    f.evaluator = [](double, double da, double) { return 1.0 / std::sqrt(da); };
    QuadratureOptions o;
    o.validate_exponents = false;
    for (auto _ : state) benchmark::DoNotOptimize(integrate_endpoint_singular(f, o));
}
BENCHMARK(BM_TanhSinhSqrt);

static void BM_ExitProbabilities(benchmark::State& state) {
    const FlowSystem& fs = reference_system();
    for (auto _ : state) benchmark::DoNotOptimize(exit_prob_upper(fs, 0.1));
}
BENCHMARK(BM_ExitProbabilities);

static void BM_MeanPassageZeroBoundary(benchmark::State& state) {
    const FlowSystem& fs = reference_system();
    for (auto _ : state) benchmark::DoNotOptimize(mean_passage(fs, 0.5, 0.7));
}
BENCHMARK(BM_MeanPassageZeroBoundary);

static void BM_Normalizers(benchmark::State& state) {
    const FlowSystem& fs = reference_system();
    const Interval gp = *fs.regime().regions.g_plus;
    for (auto _ : state) benchmark::DoNotOptimize(normalizers(fs, gp));
}
BENCHMARK(BM_Normalizers);
