// telewell: analytics and exact simulation of a two-state velocity-switching
// process in a double-well potential.
//
//   telewell <command> --config path.json [--out dir]
//
// Commands: classify, flow, simulate, exit-prob, mfpt, invariant, validate.
// Exit codes: 0 success, 2 config error, 3 regime/geometry error,
// 4 non-convergence, 5 validation failure.

#include "telewell/invariant.hpp"
#include "telewell/io.hpp"
#include "telewell/passage.hpp"
#include "telewell/telegraph.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace telewell;
using nlohmann::json;

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir;
};

RunConfig resolve_config(const Cli& cli) {
    RunConfig cfg = cli.config_path.empty() ? RunConfig{} : load_run_config(cli.config_path);
    if (const char* env = std::getenv("TELEWELL_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
    if (const char* env = std::getenv("TELEWELL_THREADS"))
        cfg.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    return cfg;
}

std::ofstream open_out(const Cli& cli, const std::string& name) {
    std::filesystem::path dir = cli.out_dir.empty() ? "." : cli.out_dir;
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) throw ConfigError("cannot write output file: " + (dir / name).string());
    return os;
}

json interval_json(const std::optional<Interval>& g) {
    if (!g) return nullptr;
    return json::array({g->lo, g->hi});
}

int cmd_classify(const Cli& cli) {
    const RunConfig cfg = resolve_config(cli);
    const Regime regime = classify_regime(cfg.potential, VelocityPair(cfg.c0, cfg.c1));
    const Landscape land = validate_double_well(cfg.potential);
    json j;
    j["tag"] = to_string(regime.tag);
    j["wells0"] = regime.wells0;
    j["wells1"] = regime.wells1;
    j["V"] = land.V;
    j["v"] = land.v;
    j["critical_points"] = {land.x_minus, land.x_zero, land.x_plus};
    j["G_minus"] = interval_json(regime.regions.g_minus);
    j["G_plus"] = interval_json(regime.regions.g_plus);
    j["G0"] = interval_json(regime.regions.g_zero);
    j["G"] = interval_json(regime.regions.g_merged);
    j["seed"] = cfg.seed;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_flow(const Cli& cli) {
    const RunConfig cfg = resolve_config(cli);
    FlowSystem fs(cfg.potential, VelocityPair(cfg.c0, cfg.c1), RatePair(cfg.lambda0, cfg.lambda1));
    auto branches = open_out(cli, "branches.csv");
    write_csv_header(branches, cfg);
    fs.dump_branches_csv(branches);
    auto samples = open_out(cli, "phi_samples.csv");
    write_csv_header(samples, cfg);
    fs.dump_phi_samples_csv(samples, 128);
    std::cout << "wrote branches.csv, phi_samples.csv\n";
    return 0;
}

void write_svg_path(std::ostream& os, const Trajectory& traj, const FlowSystem& fs,
                    double horizon) {
    // minimal time-vs-position polyline with the attractor bands shaded
    const int W = 900, H = 420;
    double lo = 1e300, hi = -1e300;
    for (const Segment& s : traj.segments) {
        lo = std::min(lo, s.start_position);
        hi = std::max(hi, s.start_position);
    }
    const Regions& r = fs.regime().regions;
    for (const auto& g : {r.g_minus, r.g_plus, r.g_merged})
        if (g) {
            lo = std::min(lo, g->lo);
            hi = std::max(hi, g->hi);
        }
    const double pad = 0.08 * (hi - lo + 1e-12);
    lo -= pad;
    hi += pad;
    auto X = [&](double t) { return 40.0 + (W - 60.0) * t / horizon; };
    auto Y = [&](double x) { return H - 30.0 - (H - 60.0) * (x - lo) / (hi - lo); };
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    for (const auto& g : {r.g_minus, r.g_plus, r.g_merged})
        if (g)
            os << "<rect x='40' y='" << Y(g->hi) << "' width='" << W - 60 << "' height='"
               << Y(g->lo) - Y(g->hi) << "' fill='#dce9f7'/>\n";
    os << "<polyline fill='none' stroke='#b03030' stroke-width='1' points='";
    const int per_segment = 8;
    for (const Segment& s : traj.segments) {
        for (int k = 0; k < per_segment; ++k) {
            const double dt = s.duration * k / per_segment;
            os << X(s.start_time + dt) << ',' << Y(fs.pattern(s.state, dt, s.start_position))
               << ' ';
        }
    }
    os << X(traj.final_time) << ',' << Y(traj.final_position);
    os << "'/>\n<line x1='40' y1='" << Y(lo + pad) << "' x2='40' y2='" << Y(hi - pad)
       << "' stroke='black'/>\n</svg>\n";
}

int cmd_simulate(const Cli& cli) {
    const RunConfig cfg = resolve_config(cli);
    Simulator sim(cfg.process(), cfg.threads);
    const Trajectory traj = sim.sample_path(cfg.x, cfg.initial_state, cfg.horizon);
    auto os = open_out(cli, "trajectory.csv");
    write_csv_header(os, cfg);
    os << "t_start,x_start,state,duration\n";
    os.precision(17);
    for (const Segment& s : traj.segments)
        os << s.start_time << ',' << s.start_position << ',' << s.state << ',' << s.duration
           << '\n';
    if (cfg.svg) {
        auto svg = open_out(cli, "trajectory.svg");
        write_svg_path(svg, traj, sim.flows(), cfg.horizon);
    }
    std::cout << "segments=" << traj.segments.size() << " final_x=" << traj.final_position
              << '\n';
    return 0;
}

int run_batch_command(const Cli& cli, const std::string& quantity, const char* file,
                      const char* header) {
    const RunConfig cfg = resolve_config(cli);
    FlowSystem fs(cfg.potential, VelocityPair(cfg.c0, cfg.c1), RatePair(cfg.lambda0, cfg.lambda1));
    BatchRequest req;
    req.quantity = quantity;
    req.xs = cfg.xs;
    req.y = cfg.y;
    if (req.xs.empty()) {
        if (quantity == "exit_prob") {
            const auto& g0 = fs.regime().regions.g_zero;
            if (!g0) throw WrongRegimeError("no metastable interval in this regime");
            for (int k = 1; k <= 21; ++k) req.xs.push_back(g0->lo + g0->length() * k / 22.0);
        } else {
            req.xs.push_back(cfg.x);
        }
    }
    const auto rows = run_batch(fs, req, cfg.passage_options());
    auto os = open_out(cli, file);
    write_csv_header(os, cfg);
    os << header << '\n';
    os.precision(12);
    for (const auto& r : rows)
        os << r.x << ',' << r.v0 << ',' << r.v1 << ',' << r.err0 << ',' << r.err1 << ','
           << r.case_tag << '\n';
    std::cout << "wrote " << file << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_invariant(const Cli& cli) {
    const RunConfig cfg = resolve_config(cli);
    FlowSystem fs(cfg.potential, VelocityPair(cfg.c0, cfg.c1), RatePair(cfg.lambda0, cfg.lambda1));
    const Interval g = fs.attractor_containing(cfg.x);
    InvariantOptions opts;
    opts.tol = cfg.quadrature_tol;
    const auto grid = chebyshev_grid(g, cfg.grid);
    const InvariantDensity d = stationary_density(fs, g, grid, opts);
    const auto fp = fokker_planck_residual(fs, d);

    auto os = open_out(cli, "invariant.csv");
    write_csv_header(os, cfg);
    os << "x,pi0,pi1\n";
    os.precision(12);
    for (std::size_t k = 0; k < d.grid.size(); ++k)
        os << d.grid[k] << ',' << d.pi0[k] << ',' << d.pi1[k] << '\n';

    json j;
    j["support"] = {g.lo, g.hi};
    j["C0"] = d.C0;
    j["C1"] = d.C1;
    j["mass0_expected"] = cfg.lambda1 / (cfg.lambda0 + cfg.lambda1);
    j["mass1_expected"] = cfg.lambda0 / (cfg.lambda0 + cfg.lambda1);
    j["fp_residual_max"] = std::max(fp.max0, fp.max1);
    j["fp_residual_scale"] = fp.density_max;
    j["seed"] = cfg.seed;
    std::cout << j.dump(2) << '\n';
    return 0;
}


int cmd_estimate(const Cli& cli) {
    const RunConfig cfg = resolve_config(cli);
    Simulator sim(cfg.process(), cfg.threads);
    Estimate e;
    if (cfg.quantity == "exit_prob")
        e = sim.estimate_exit_prob(cfg.x, cfg.initial_state, cfg.n, cfg.t_max);
    else if (cfg.quantity == "mfpt" || cfg.quantity.empty())
        e = sim.estimate_mfpt(cfg.x, cfg.y, cfg.initial_state, cfg.n, cfg.t_max);
    else
        throw ConfigError("estimate quantity must be mfpt or exit_prob");
    std::cout << estimate_json(e, cfg.seed) << '\n';
    return 0;
}

struct Check {
    std::string name;
    bool pass;
    double z;
};

int cmd_validate(const Cli& cli) {
    const RunConfig cfg = resolve_config(cli);
    Simulator sim(cfg.process(), cfg.threads);
    const FlowSystem& fs = sim.flows();
    const double sigma = cfg.sigma;
    std::vector<Check> checks;
    auto push = [&](std::string name, double z) {
        checks.push_back({std::move(name), std::abs(z) <= sigma, z});
    };

    if (fs.regime().tag != RegimeTag::CaseA)
        throw WrongRegimeError("validate expects a case-A configuration");
    const Interval g0 = *fs.regime().regions.g_zero;
    const Interval gp = *fs.regime().regions.g_plus;

    // exit probabilities at five interior points
    for (int k = 1; k <= 5; ++k) {
        const double x = g0.lo + g0.length() * k / 6.0;
        const auto p = exit_prob_upper(fs, x, cfg.passage_options());
        const auto e = sim.estimate_exit_prob(x, k % 2, cfg.n);
        const double closed = (k % 2 == 0) ? p.p0 : p.p1;
        push("exit_prob[" + std::to_string(k) + "]",
             (e.mean - closed) / std::max(e.std_error, 1e-12));
    }

    // mean passage at five (x, y, i) configurations in proven cases
    const double a0 = g0.hi, ap = gp.lo, bp = gp.hi;
    const std::tuple<double, double, int> mf[] = {
        {a0 + 0.4 * (ap - a0), a0 + 0.8 * (ap - a0), 0},
        {a0 + 0.4 * (ap - a0), ap, 1},
        {bp + 0.2, bp, 0},
        {bp + 0.3, bp + 0.1, 1},
        {a0 + 0.6 * (ap - a0), ap, 0},
    };
    for (const auto& [x, y, i] : mf) {
        const auto m = mean_passage(fs, x, y, cfg.passage_options());
        const auto e = sim.estimate_mfpt(x, y, i, cfg.n, cfg.t_max);
        const double closed = i == 0 ? m.m0 : m.m1;
        push("mfpt[" + std::string(to_string(m.case_tag)) + ",i=" + std::to_string(i) + "]",
             (e.mean - closed) / std::max(e.std_error, 1e-12));
    }

    // per-state occupation mass on G+ over independent replicas
    {
        const double want = cfg.lambda0 == cfg.lambda1
                                ? 0.5
                                : cfg.lambda1 / (cfg.lambda0 + cfg.lambda1);
        const int reps = 8;
        double sum = 0.0, sum_sq = 0.0;
        for (int r = 0; r < reps; ++r) {
            ProcessConfig pc = cfg.process();
            pc.seed = cfg.seed + 1000003ULL * (r + 1);
            Simulator rep(pc, cfg.threads);
            const auto hist = rep.occupation_histogram(gp.midpoint(), r % 2, 100.0, 2600.0, 16);
            double m0 = 0.0;
            for (double v : hist.mass0) m0 += v;
            const double frac = m0 / hist.total_time;
            sum += frac;
            sum_sq += frac * frac;
        }
        const double mean = sum / reps;
        const double sd = std::sqrt(std::max(0.0, sum_sq / reps - mean * mean) / (reps - 1));
        push("occupation_state0_mass", (mean - want) / std::max(sd, 1e-12));
    }

    // semigroup derivative against the generator rows
    {
        SmoothFn f0{[](double x) { return x; }, [](double) { return 1.0; }};
        SmoothFn f1{[](double x) { return x * x; }, [](double x) { return 2.0 * x; }};
        const double x = gp.midpoint();
        const std::int64_t n = std::min<std::int64_t>(cfg.n * 10, 2000000);
        for (int i : {0, 1}) {
            const auto chk = sim.semigroup_derivative_check(f0, f1, x, i, 1e-3, n);
            // allow an O(h) bias on top of the statistical band
            push("semigroup[i=" + std::to_string(i) + "]",
                 chk.residual / (chk.std_error + 2e-3));
        }
    }

    bool all = true;
    json out;
    out["sigma"] = sigma;
    out["n"] = cfg.n;
    out["seed"] = cfg.seed;
    json arr = json::array();
    for (const auto& c : checks) {
        all = all && c.pass;
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"z", c.z}});
    }
    out["checks"] = arr;
    out["verdict"] = all ? "pass" : "fail";
    std::cout << out.dump(2) << '\n';
    return all ? 0 : 5;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"telegraph process in a double-well potential"};
    app.require_subcommand(1);

    Cli cli;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "JSON run configuration");
        sub->add_option("--out", cli.out_dir, "output directory (default .)");
        return sub;
    };
    auto* c_classify = add_common(app.add_subcommand("classify", "regime classification report"));
    auto* c_flow = add_common(app.add_subcommand("flow", "branch table and Phi samples (CSV)"));
    auto* c_sim = add_common(app.add_subcommand("simulate", "sample one exact trajectory (CSV)"));
    auto* c_exit = add_common(app.add_subcommand("exit-prob", "closed-form exit probabilities"));
    auto* c_mfpt = add_common(app.add_subcommand("mfpt", "closed-form mean first-passage times"));
    auto* c_inv = add_common(app.add_subcommand("invariant", "stationary density on an attractor"));
    auto* c_est =
        add_common(app.add_subcommand("estimate", "Monte Carlo estimate as a JSON record"));
    auto* c_val = add_common(app.add_subcommand("validate", "closed form vs Monte Carlo battery"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_classify->parsed()) return cmd_classify(cli);
        if (c_flow->parsed()) return cmd_flow(cli);
        if (c_sim->parsed()) return cmd_simulate(cli);
        if (c_exit->parsed())
            return run_batch_command(cli, "exit_prob", "exit_prob.csv", "x,p0,p1,err0,err1,case");
        if (c_mfpt->parsed())
            return run_batch_command(cli, "mfpt", "mfpt.csv", "x,m0,m1,err0,err1,case");
        if (c_inv->parsed()) return cmd_invariant(cli);
        if (c_est->parsed()) return cmd_estimate(cli);
        if (c_val->parsed()) return cmd_validate(cli);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
