#pragma once

#include "telewell/passage.hpp"
#include "telewell/telegraph.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace telewell {

/// Fully resolved run configuration; every field has a documented default
/// and the resolved values are echoed into all outputs.
struct RunConfig {
    PotentialSpec potential{{0.0, -1.0, 0.0, 1.0}, "quartic"};
    double c0 = 0.3;
    double c1 = -0.3;
    double lambda0 = 1.0;
    double lambda1 = 1.0;
    std::uint64_t seed = 20240901;

    // command-specific parameters
    std::vector<double> xs;   // grid of start positions (exit-prob / mfpt)
    double x = 0.0;           // start position (simulate / validate)
    double y = 1.0;           // target level (mfpt)
    bool has_y = false;
    int initial_state = 0;
    std::int64_t n = 100000;  // Monte Carlo sample count
    double horizon = 100.0;
    double burn_in = 0.0;
    double t_max = 0.0;       // 0: estimator default policy
    int grid = 400;
    int bins = 200;
    double quadrature_tol = 1e-10;
    double sigma = 3.0;       // statistical acceptance threshold
    std::string quantity;     // batch quantity (exit_prob | mfpt)
    bool svg = false;
    unsigned threads = 0;     // 0: hardware concurrency

    ProcessConfig process() const {
        return ProcessConfig{potential, VelocityPair(c0, c1), RatePair(lambda0, lambda1), seed};
    }
    PassageOptions passage_options() const {
        PassageOptions o;
        o.tol_1d = quadrature_tol;
        o.tol_2d = std::max(quadrature_tol, 1e-8);
        return o;
    }
};

/// Parses the JSON run configuration; unknown keys are rejected to catch
/// typos. Throws ConfigError with a readable message.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// One "key=value" line per resolved field, used as the reproducibility
/// header of every output file.
std::vector<std::string> config_echo(const RunConfig& cfg);

void write_csv_header(std::ostream& os, const RunConfig& cfg);

std::string estimate_json(const Estimate& e, std::uint64_t seed);

} // namespace telewell
