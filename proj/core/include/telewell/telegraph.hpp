#pragma once

#include "telewell/flow.hpp"
#include "telewell/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace telewell {

struct ProcessConfig {
    PotentialSpec spec;
    VelocityPair velocities;
    RatePair rates;
    std::uint64_t seed = 0;
};

struct Segment {
    double start_time;
    double start_position;
    int state;
    double duration;
};

struct Trajectory {
    std::vector<Segment> segments;
    double final_time = 0.0;
    double final_position = 0.0;
    int final_state = 0;
};

struct FptSample {
    bool hit = false;
    double time = 0.0;        // valid when hit
    double censored_at = 0.0; // horizon used when not hit
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
    double censored_fraction = 0.0;
};

/// Test function with its derivative, as the generator needs both.
struct SmoothFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

struct SemigroupCheck {
    double derivative_estimate = 0.0; // (E f(Xi(h)) - f_i(x)) / h
    double generator_value = 0.0;     // ((Lambda + L) f)_i (x)
    double residual = 0.0;
    double std_error = 0.0;           // MC std error of derivative_estimate
    std::int64_t n = 0;
};

struct OccupationHistogram {
    Interval range;
    std::vector<double> mass0; // time spent per bin in state 0
    std::vector<double> mass1;
    double total_time = 0.0;   // horizon - burn_in

    double bin_width() const { return range.length() / static_cast<double>(mass0.size()); }
    double total_mass() const;
};

/// Exact event-driven simulation of the switching process: exponential
/// holding times plus Phi-inversion for the deterministic legs, so the only
/// error left is statistical. Immutable and safe to share across threads.
class Simulator {
public:
    explicit Simulator(ProcessConfig config, unsigned threads = 0);

    const ProcessConfig& config() const { return config_; }
    const FlowSystem& flows() const { return flows_; }
    unsigned threads() const { return threads_; }

    /// default censoring horizon: 1e4 / min(lambda)
    double default_t_max() const { return 1e4 / config_.rates.min(); }

    Trajectory sample_path(double x0, int i0, double horizon, std::uint64_t path_index = 0) const;

    FptSample sample_first_passage(double x, double y, int i0, double t_max,
                                   std::uint64_t path_index = 0) const;

    /// P{exit G0 through a0 | start (x, i0)}, estimated over the decided
    /// paths; censored paths are counted separately. Requires case A and
    /// x inside G0.
    Estimate estimate_exit_prob(double x, int i0, std::int64_t n, double t_max = 0.0) const;

    /// Mean first-passage time over the hit paths; censored_fraction must
    /// stay near zero for the estimate to be meaningful.
    Estimate estimate_mfpt(double x, double y, int i0, std::int64_t n, double t_max = 0.0) const;

    /// E[exp(-q T)] with censored paths contributing exp(-q t_max), an
    /// upper-bias bound reported through censored_fraction.
    Estimate estimate_mgf(double q, double x, double y, int i0, std::int64_t n,
                          double t_max = 0.0) const;

    /// Exact time-weighted occupation mass per (bin, state) over
    /// [burn_in, horizon]; the range is the invariant attractor containing
    /// x0. Time in a bin comes from Phi differences, not from sampling.
    OccupationHistogram occupation_histogram(double x0, int i0, double burn_in, double horizon,
                                             int bins) const;

    /// Rows of (Lambda + L) f at x.
    std::pair<double, double> generator_apply(const SmoothFn& f0, const SmoothFn& f1,
                                              double x) const;

    SemigroupCheck semigroup_derivative_check(const SmoothFn& f0, const SmoothFn& f1, double x,
                                              int i, double h, std::int64_t n) const;

private:
    struct PathAccumulator;
    template <typename PerPath>
    void run_paths(std::int64_t n, const PerPath& body) const;

    ProcessConfig config_;
    FlowSystem flows_;
    unsigned threads_;
};

} // namespace telewell
