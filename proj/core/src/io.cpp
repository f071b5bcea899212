#include "telewell/io.hpp"

#include "telewell/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace telewell {

using nlohmann::json;

namespace {

const char* kKnownKeys[] = {
    "potential", "c0",   "c1",   "lambda0",        "lambda1", "seed",     "xs",
    "x",         "y",    "initial_state",          "n",       "horizon",  "burn_in",
    "t_max",     "grid", "bins", "quadrature_tol", "sigma",   "quantity", "svg",
    "threads",
};

bool known_key(const std::string& k) {
    for (const char* s : kKnownKeys)
        if (k == s) return true;
    return false;
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    for (const auto& item : j.items())
        if (!known_key(item.key())) throw ConfigError("unknown config key: " + item.key());

    RunConfig cfg;
    try {
        if (j.contains("potential")) {
            const json& p = j.at("potential");
            if (!p.is_object() || !p.contains("slope_coefficients"))
                throw ConfigError("potential needs {\"slope_coefficients\": [...]}");
            cfg.potential.slope_coefficients =
                p.at("slope_coefficients").get<std::vector<double>>();
            cfg.potential.label = p.value("label", std::string{});
        }
        cfg.c0 = j.value("c0", cfg.c0);
        cfg.c1 = j.value("c1", cfg.c1);
        cfg.lambda0 = j.value("lambda0", cfg.lambda0);
        cfg.lambda1 = j.value("lambda1", cfg.lambda1);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("xs")) cfg.xs = j.at("xs").get<std::vector<double>>();
        cfg.x = j.value("x", cfg.x);
        if (j.contains("y")) {
            cfg.y = j.at("y").get<double>();
            cfg.has_y = true;
        }
        cfg.initial_state = j.value("initial_state", cfg.initial_state);
        cfg.n = j.value("n", cfg.n);
        cfg.horizon = j.value("horizon", cfg.horizon);
        cfg.burn_in = j.value("burn_in", cfg.burn_in);
        cfg.t_max = j.value("t_max", cfg.t_max);
        cfg.grid = j.value("grid", cfg.grid);
        cfg.bins = j.value("bins", cfg.bins);
        cfg.quadrature_tol = j.value("quadrature_tol", cfg.quadrature_tol);
        cfg.sigma = j.value("sigma", cfg.sigma);
        cfg.quantity = j.value("quantity", cfg.quantity);
        cfg.svg = j.value("svg", cfg.svg);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    if (cfg.initial_state != 0 && cfg.initial_state != 1)
        throw ConfigError("initial_state must be 0 or 1");
    if (cfg.n <= 0) throw ConfigError("n must be positive");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::vector<std::string> config_echo(const RunConfig& cfg) {
    std::vector<std::string> out;
    auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + "=" + v); };
    std::ostringstream coeffs;
    for (std::size_t i = 0; i < cfg.potential.slope_coefficients.size(); ++i)
        coeffs << (i ? " " : "") << cfg.potential.slope_coefficients[i];
    add("slope_coefficients", coeffs.str());
    if (!cfg.potential.label.empty()) add("label", cfg.potential.label);
    add("c0", std::to_string(cfg.c0));
    add("c1", std::to_string(cfg.c1));
    add("lambda0", std::to_string(cfg.lambda0));
    add("lambda1", std::to_string(cfg.lambda1));
    add("seed", std::to_string(cfg.seed));
    add("n", std::to_string(cfg.n));
    add("quadrature_tol", std::to_string(cfg.quadrature_tol));
    add("sigma", std::to_string(cfg.sigma));
    return out;
}

void write_csv_header(std::ostream& os, const RunConfig& cfg) {
    for (const auto& line : config_echo(cfg)) os << "# " << line << '\n';
}

std::string estimate_json(const Estimate& e, std::uint64_t seed) {
    json j;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["n"] = e.n;
    j["censored_fraction"] = e.censored_fraction;
    j["seed"] = seed;
    return j.dump();
}

} // namespace telewell
