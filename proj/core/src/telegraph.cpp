#include "telewell/telegraph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace telewell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kBlock = 4096; // paths per reduction block

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

} // namespace

double OccupationHistogram::total_mass() const {
    double s = 0.0;
    for (double m : mass0) s += m;
    for (double m : mass1) s += m;
    return s;
}

Simulator::Simulator(ProcessConfig config, unsigned threads)
    : config_(std::move(config)),
      flows_(config_.spec, config_.velocities, config_.rates),
      threads_(resolve_threads(threads)) {}

Trajectory Simulator::sample_path(double x0, int i0, double horizon,
                                  std::uint64_t path_index) const {
    if (!(horizon > 0.0)) throw ConfigError("sample_path requires horizon > 0");
    SplitMix64 rng = SplitMix64::for_stream(config_.seed, path_index);

    Trajectory traj;
    double t = 0.0;
    double x = x0;
    int state = i0;
    while (t < horizon) {
        const double tau = rng.exponential(flows_.rate(state));
        const double dur = std::min(tau, horizon - t);
        traj.segments.push_back({t, x, state, dur});
        x = flows_.pattern(state, dur, x);
        t += dur;
        if (dur == tau) state = 1 - state;
    }
    traj.final_time = horizon;
    traj.final_position = x;
    traj.final_state = state;
    return traj;
}

FptSample Simulator::sample_first_passage(double x, double y, int i0, double t_max,
                                          std::uint64_t path_index) const {
    if (!(t_max > 0.0)) throw ConfigError("sample_first_passage requires t_max > 0");
    if (x == y) return {true, 0.0, t_max};
    SplitMix64 rng = SplitMix64::for_stream(config_.seed, path_index);

    double t = 0.0;
    double z = x;
    int state = i0;
    while (t < t_max) {
        const double tau = rng.exponential(flows_.rate(state));
        const double dur = std::min(tau, t_max - t);
        const double hit = flows_.reach_time(state, z, y);
        if (hit <= dur) return {true, t + hit, t_max};
        z = flows_.pattern(state, dur, z);
        t += dur;
        if (dur == tau) state = 1 - state;
    }
    return {false, 0.0, t_max};
}

// ---------------------------------------------------------------------------
// deterministic block-parallel reduction

template <typename PerPath>
void Simulator::run_paths(std::int64_t n, const PerPath& body) const {
    const std::int64_t blocks = (n + kBlock - 1) / kBlock;
    if (threads_ <= 1 || blocks <= 1) {
        for (std::int64_t b = 0; b < blocks; ++b)
            body(b, b * kBlock, std::min(n, (b + 1) * kBlock));
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            body(b, b * kBlock, std::min(n, (b + 1) * kBlock));
        }
    };
    std::vector<std::thread> pool;
    const unsigned nw = std::min<unsigned>(threads_, static_cast<unsigned>(blocks));
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

namespace {

struct MomentBlock {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t n = 0;
    std::int64_t censored = 0;
};

Estimate reduce_moments(const std::vector<MomentBlock>& blocks, std::int64_t n_total) {
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t n = 0, censored = 0;
    for (const auto& b : blocks) { // fixed order keeps the result thread-count independent
        sum += b.sum;
        sum_sq += b.sum_sq;
        n += b.n;
        censored += b.censored;
    }
    Estimate e;
    e.n = n;
    e.censored_fraction =
        n_total > 0 ? static_cast<double>(censored) / static_cast<double>(n_total) : 0.0;
    if (n > 0) {
        e.mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sum_sq / static_cast<double>(n) - e.mean * e.mean);
        e.std_error = std::sqrt(var / static_cast<double>(n));
    } else {
        e.mean = std::numeric_limits<double>::quiet_NaN();
        e.std_error = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
}

} // namespace

Estimate Simulator::estimate_exit_prob(double x, int i0, std::int64_t n, double t_max) const {
    const Regime& regime = flows_.regime();
    if (regime.tag != RegimeTag::CaseA)
        throw WrongRegimeError("exit probability needs the two-attractor regime");
    const Interval g0 = *regime.regions.g_zero;
    if (!g0.contains_interior(x))
        throw OutOfIntervalError("start position must lie inside the metastable interval");
    if (t_max <= 0.0) t_max = default_t_max();

    const double upper = g0.hi; // a0, crossed only by the up-moving pattern 0
    const double lower = g0.lo; // b0, crossed only by the down-moving pattern 1

    std::vector<MomentBlock> blocks(static_cast<std::size_t>((n + kBlock - 1) / kBlock));
    run_paths(n, [&](std::int64_t b, std::int64_t lo_path, std::int64_t hi_path) {
        MomentBlock& acc = blocks[static_cast<std::size_t>(b)];
        for (std::int64_t p = lo_path; p < hi_path; ++p) {
            SplitMix64 rng = SplitMix64::for_stream(config_.seed, static_cast<std::uint64_t>(p));
            double t = 0.0, z = x;
            int state = i0;
            int outcome = -1; // 1 exit up, 0 exit down, -1 censored
            while (t < t_max) {
                const double tau = rng.exponential(flows_.rate(state));
                const double dur = std::min(tau, t_max - t);
                const double up = flows_.reach_time(state, z, upper);
                if (up <= dur) { outcome = 1; break; }
                const double dn = flows_.reach_time(state, z, lower);
                if (dn <= dur) { outcome = 0; break; }
                z = flows_.pattern(state, dur, z);
                t += dur;
                if (dur == tau) state = 1 - state;
            }
            if (outcome < 0) {
                ++acc.censored;
            } else {
                acc.sum += outcome;
                acc.sum_sq += outcome;
                ++acc.n;
            }
        }
    });
    return reduce_moments(blocks, n);
}

Estimate Simulator::estimate_mfpt(double x, double y, int i0, std::int64_t n,
                                  double t_max) const {
    if (t_max <= 0.0) t_max = default_t_max();
    std::vector<MomentBlock> blocks(static_cast<std::size_t>((n + kBlock - 1) / kBlock));
    run_paths(n, [&](std::int64_t b, std::int64_t lo_path, std::int64_t hi_path) {
        MomentBlock& acc = blocks[static_cast<std::size_t>(b)];
        for (std::int64_t p = lo_path; p < hi_path; ++p) {
            const FptSample s =
                sample_first_passage(x, y, i0, t_max, static_cast<std::uint64_t>(p));
            if (s.hit) {
                acc.sum += s.time;
                acc.sum_sq += s.time * s.time;
                ++acc.n;
            } else {
                ++acc.censored;
            }
        }
    });
    return reduce_moments(blocks, n);
}

Estimate Simulator::estimate_mgf(double q, double x, double y, int i0, std::int64_t n,
                                 double t_max) const {
    if (q < 0.0) throw ConfigError("estimate_mgf requires q >= 0");
    if (t_max <= 0.0) t_max = default_t_max();
    std::vector<MomentBlock> blocks(static_cast<std::size_t>((n + kBlock - 1) / kBlock));
    run_paths(n, [&](std::int64_t b, std::int64_t lo_path, std::int64_t hi_path) {
        MomentBlock& acc = blocks[static_cast<std::size_t>(b)];
        for (std::int64_t p = lo_path; p < hi_path; ++p) {
            const FptSample s =
                sample_first_passage(x, y, i0, t_max, static_cast<std::uint64_t>(p));
            // censored paths contribute exp(-q t_max): an upper bound on
            // their exp(-q T), reported through censored_fraction
            const double v = s.hit ? std::exp(-q * s.time) : std::exp(-q * t_max);
            acc.sum += v;
            acc.sum_sq += v * v;
            ++acc.n;
            if (!s.hit) ++acc.censored;
        }
    });
    return reduce_moments(blocks, n);
}

OccupationHistogram Simulator::occupation_histogram(double x0, int i0, double burn_in,
                                                    double horizon, int bins) const {
    if (!(horizon > burn_in) || burn_in < 0.0)
        throw ConfigError("occupation_histogram requires horizon > burn_in >= 0");
    if (bins <= 0) throw ConfigError("occupation_histogram requires bins > 0");
    const Interval g = flows_.attractor_containing(x0); // WrongRegime outside

    OccupationHistogram hist;
    hist.range = g;
    hist.mass0.assign(static_cast<std::size_t>(bins), 0.0);
    hist.mass1.assign(static_cast<std::size_t>(bins), 0.0);
    hist.total_time = horizon - burn_in;
    const double width = g.length() / bins;

    SplitMix64 rng = SplitMix64::for_stream(config_.seed, 0);
    double t = 0.0, x = x0;
    int state = i0;

    auto deposit = [&](int st, double za, double zb, double dt_total) {
        // exact time spent in each bin crossed by the monotone leg za -> zb
        auto& mass = st == 0 ? hist.mass0 : hist.mass1;
        if (za == zb || dt_total <= 0.0) {
            if (dt_total > 0.0) {
                int k = std::clamp(static_cast<int>((za - g.lo) / width), 0, bins - 1);
                mass[static_cast<std::size_t>(k)] += dt_total;
            }
            return;
        }
        const FlowMap& fm = flows_.flow_map_at(st, za);
        const int dir = fm.branch().direction;
        const double phi_a = fm.phi(za);
        int ka = std::clamp(static_cast<int>((za - g.lo) / width), 0, bins - 1);
        int kb = std::clamp(static_cast<int>((zb - g.lo) / width), 0, bins - 1);
        if (ka == kb) {
            mass[static_cast<std::size_t>(ka)] += dt_total;
            return;
        }
        double prev_phi = phi_a;
        double used = 0.0;
        for (int k = ka; k != kb; k += dir) {
            const double edge = g.lo + width * (dir > 0 ? k + 1 : k);
            const double phi_edge = fm.phi(edge);
            const double dt = phi_edge - prev_phi;
            mass[static_cast<std::size_t>(k)] += dt;
            used += dt;
            prev_phi = phi_edge;
        }
        mass[static_cast<std::size_t>(kb)] += std::max(0.0, dt_total - used);
    };

    while (t < horizon) {
        const double tau = rng.exponential(flows_.rate(state));
        const double dur = std::min(tau, horizon - t);
        const double t_end = t + dur;
        if (t_end > burn_in) {
            // clip the leg to [burn_in, horizon]
            double za = x, clip_start = t;
            if (t < burn_in) {
                za = flows_.pattern(state, burn_in - t, x);
                clip_start = burn_in;
            }
            const double zb = flows_.pattern(state, t_end - clip_start, za);
            deposit(state, za, zb, t_end - clip_start);
        }
        x = flows_.pattern(state, dur, x);
        t = t_end;
        if (dur == tau) state = 1 - state;
    }
    return hist;
}

std::pair<double, double> Simulator::generator_apply(const SmoothFn& f0, const SmoothFn& f1,
                                                     double x) const {
    const double g0 = flows_.velocity_gap(0, x);
    const double g1 = flows_.velocity_gap(1, x);
    const double l0 = config_.rates.lambda0;
    const double l1 = config_.rates.lambda1;
    const double v0 = f0.value(x), v1 = f1.value(x);
    return {g0 * f0.derivative(x) - l0 * v0 + l0 * v1,
            g1 * f1.derivative(x) + l1 * v0 - l1 * v1};
}

SemigroupCheck Simulator::semigroup_derivative_check(const SmoothFn& f0, const SmoothFn& f1,
                                                     double x, int i, double h,
                                                     std::int64_t n) const {
    if (!(h > 0.0)) throw ConfigError("semigroup check requires h > 0");
    std::vector<MomentBlock> blocks(static_cast<std::size_t>((n + kBlock - 1) / kBlock));
    run_paths(n, [&](std::int64_t b, std::int64_t lo_path, std::int64_t hi_path) {
        MomentBlock& acc = blocks[static_cast<std::size_t>(b)];
        for (std::int64_t p = lo_path; p < hi_path; ++p) {
            SplitMix64 rng = SplitMix64::for_stream(config_.seed, static_cast<std::uint64_t>(p));
            double t = 0.0, z = x;
            int state = i;
            for (;;) {
                const double tau = rng.exponential(flows_.rate(state));
                if (t + tau >= h) {
                    z = flows_.pattern(state, h - t, z);
                    break;
                }
                z = flows_.pattern(state, tau, z);
                t += tau;
                state = 1 - state;
            }
            const double v = state == 0 ? f0.value(z) : f1.value(z);
            acc.sum += v;
            acc.sum_sq += v * v;
            ++acc.n;
        }
    });
    const Estimate e = reduce_moments(blocks, n);
    const double fi = (i == 0 ? f0 : f1).value(x);
    SemigroupCheck chk;
    chk.n = e.n;
    chk.derivative_estimate = (e.mean - fi) / h;
    chk.std_error = e.std_error / h;
    const auto rows = generator_apply(f0, f1, x);
    chk.generator_value = i == 0 ? rows.first : rows.second;
    chk.residual = chk.derivative_estimate - chk.generator_value;
    return chk;
}

} // namespace telewell
