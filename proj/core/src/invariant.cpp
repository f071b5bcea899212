#include "telewell/invariant.hpp"

#include "analytic_common.hpp"
#include "telewell/errors.hpp"
#include "telewell/passage.hpp"

#include <algorithm>
#include <cmath>

namespace telewell {

namespace {

using detail::GapFactor;
using detail::LogPsi;

void require_invariant_attractor(const FlowSystem& s, const Interval& g) {
    const Regions& r = s.regime().regions;
    for (const auto& cand : {r.g_minus, r.g_plus, r.g_merged})
        if (cand && cand->lo == g.lo && cand->hi == g.hi) return;
    throw WrongRegimeError("interval is not an invariant attractor of this regime");
}

struct AttractorContext {
    LogPsi lp;
    double anchor = 0.0; // min of logPsi over the interior, so Psi^{-1} <= e^0
    double alpha_lo = 0.0, alpha_hi = 0.0; // Psi^{-1} exponents at the edges
};

AttractorContext make_attractor_context(const FlowSystem& s, const Interval& g) {
    AttractorContext ctx;
    const double probe = g.midpoint();
    ctx.lp.f0 = &s.flow_map_at(0, probe);
    ctx.lp.f1 = &s.flow_map_at(1, probe);
    ctx.lp.l0 = s.rates().lambda0;
    ctx.lp.l1 = s.rates().lambda1;
    ctx.lp.int_a = g.lo;
    ctx.lp.int_b = g.hi;
    if (g.lo < ctx.lp.f0->branch().lo || g.hi > ctx.lp.f0->branch().hi ||
        g.lo < ctx.lp.f1->branch().lo || g.hi > ctx.lp.f1->branch().hi)
        throw WrongRegimeError("attractor interval crosses a critical point");

    double lo_psi = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 32; ++k) {
        const double z = g.lo + g.length() * k / 32.0;
        lo_psi = std::min(lo_psi, ctx.lp.plain(z));
    }
    ctx.anchor = lo_psi;

    // Psi^{-1} ~ d^{+lambda_i/U''} toward the critical edge of flow i;
    // U'(g.lo) = c1 (flow 1 edge), U'(g.hi) = c0 (flow 0 edge)
    ctx.alpha_lo = s.rates().lambda1 / s.spec().curvature()(g.lo);
    ctx.alpha_hi = s.rates().lambda0 / s.spec().curvature()(g.hi);
    return ctx;
}

} // namespace

std::vector<double> chebyshev_grid(const Interval& g, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double theta = (k + 0.5) * 3.14159265358979323846 / n;
        out[static_cast<std::size_t>(n - 1 - k)] = g.midpoint() - 0.5 * g.length() * std::cos(theta);
    }
    return out;
}

std::vector<double> uniform_grid(const Interval& g, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = g.lo + g.length() * (k + 1) / (n + 1);
    return out;
}

Normalizers normalizers(const FlowSystem& s, const Interval& g, const InvariantOptions& opts) {
    require_invariant_attractor(s, g);
    const AttractorContext ctx = make_attractor_context(s, g);
    const double l0 = s.rates().lambda0, l1 = s.rates().lambda1;

    // A_i = int Psi^{-1} / |c_i - U'| with the vanishing factor pulled out
    auto integrate = [&](int i) {
        const Polynomial gap = s.spec().slope().plus_constant(-s.velocity(i)).negated();
        const double edge = (i == 0) ? g.hi : g.lo; // where c_i - U' vanishes
        GapFactor gf = GapFactor::make(gap, edge, g.lo, g.hi);
        const double sign = (i == 0) ? 1.0 : -1.0; // U' - c1 = -(c1 - U')
        const LogPsi lp = ctx.lp;
        const double anchor = ctx.anchor;
        Integrand1D f;
        f.a = g.lo;
        f.b = g.hi;
        f.at_a = EndpointBehavior::power(ctx.alpha_lo - (i == 1 ? 1.0 : 0.0));
        f.at_b = EndpointBehavior::power(ctx.alpha_hi - (i == 0 ? 1.0 : 0.0));
        f.evaluator = [lp, gf, anchor, sign](double z, double da, double db) {
            return std::exp(anchor - lp(z, da, db)) / (sign * gf.eval(z, da, db));
        };
        QuadratureOptions qopts;
        qopts.tol = opts.tol;
        return integrate_endpoint_singular(f, qopts);
    };

    Normalizers out;
    out.log_anchor = ctx.anchor;
    out.A0 = integrate(0);
    out.A1 = integrate(1);
    if (!(out.A0.value > 0.0) || !(out.A1.value > 0.0))
        throw ConsistencyError("normalizer integrals must be positive");
    // C_i carry exp(+anchor) so that pi = C exp(-logPsi)/gap is anchor free
    out.C0 = l1 / (l0 + l1) / out.A0.value;
    out.C1 = l0 / (l0 + l1) / out.A1.value;
    out.C0_error = out.C0 * (out.A0.error_estimate / out.A0.value);
    out.C1_error = out.C1 * (out.A1.error_estimate / out.A1.value);
    return out;
}

InvariantDensity stationary_density(const FlowSystem& s, const Interval& g,
                                    const std::vector<double>& grid,
                                    const InvariantOptions& opts) {
    for (double z : grid)
        if (!g.contains_interior(z))
            throw OutOfDomainError("density grid must lie strictly inside the attractor");

    const Normalizers c = normalizers(s, g, opts);
    const AttractorContext ctx = make_attractor_context(s, g);

    InvariantDensity out;
    out.support = g;
    out.grid = grid;
    out.C0 = c.C0;
    out.C1 = c.C1;
    out.C0_error = c.C0_error;
    out.C1_error = c.C1_error;
    out.pi0.reserve(grid.size());
    out.pi1.reserve(grid.size());
    for (double z : grid) {
        const double log_inv_psi = ctx.anchor - ctx.lp.plain(z); // anchored, cancels in C
        const double w = std::exp(log_inv_psi);
        const double gap0 = s.velocity_gap(0, z);
        const double gap1 = s.velocity_gap(1, z);
        out.pi0.push_back(c.C0 * w / gap0);
        out.pi1.push_back(c.C1 * w / (-gap1));
    }
    return out;
}

FpResidual fokker_planck_residual(const FlowSystem& s, const InvariantDensity& d) {
    FpResidual res;
    const std::size_t n = d.grid.size();
    if (n < 3) throw ConfigError("residual needs at least three grid points");
    const double l0 = s.rates().lambda0, l1 = s.rates().lambda1;

    std::vector<double> f0(n), f1(n); // fluxes (c_i - U') pi_i
    for (std::size_t k = 0; k < n; ++k) {
        f0[k] = s.velocity_gap(0, d.grid[k]) * d.pi0[k];
        f1[k] = s.velocity_gap(1, d.grid[k]) * d.pi1[k];
        res.density_max = std::max({res.density_max, d.pi0[k], d.pi1[k]});
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double hm = d.grid[k] - d.grid[k - 1];
        const double hp = d.grid[k + 1] - d.grid[k];
        // three-point first derivative on a nonuniform grid
        auto ddx = [&](const std::vector<double>& f) {
            return (f[k + 1] * hm * hm - f[k - 1] * hp * hp + f[k] * (hp * hp - hm * hm)) /
                   (hm * hp * (hm + hp));
        };
        const double r0 = -ddx(f0) - l0 * d.pi0[k] + l1 * d.pi1[k];
        const double r1 = -ddx(f1) + l0 * d.pi0[k] - l1 * d.pi1[k];
        res.max0 = std::max(res.max0, std::abs(r0));
        res.max1 = std::max(res.max1, std::abs(r1));
    }
    return res;
}

double density_state_bin_mass(const FlowSystem& s, const Interval& g, const Normalizers& c,
                              int state, double lo, double hi, const InvariantOptions& opts) {
    const AttractorContext ctx = make_attractor_context(s, g);
    auto piece = [&](int i) {
        const Polynomial gap = s.spec().slope().plus_constant(-s.velocity(i)).negated();
        const double edge = (i == 0) ? g.hi : g.lo;
        const bool edge_inside = (edge == lo || edge == hi);
        GapFactor gf = GapFactor::make(gap, edge_inside ? std::optional<double>(edge) : std::nullopt,
                                       lo, hi);
        const double sign = (i == 0) ? 1.0 : -1.0;
        const double cnorm = (i == 0) ? c.C0 : c.C1;
        LogPsi lp = ctx.lp;
        lp.int_a = lo; // exact distances arrive relative to the bin
        lp.int_b = hi;
        const double anchor = ctx.anchor;
        Integrand1D f;
        f.a = lo;
        f.b = hi;
        // Psi^{-1} vanishes with a power law at both attractor edges; the
        // gap subtracts one more power where it vanishes
        f.at_a = (lo == g.lo) ? EndpointBehavior::power(ctx.alpha_lo - (i == 1 ? 1.0 : 0.0))
                              : EndpointBehavior::regular();
        f.at_b = (hi == g.hi) ? EndpointBehavior::power(ctx.alpha_hi - (i == 0 ? 1.0 : 0.0))
                              : EndpointBehavior::regular();
        f.evaluator = [lp, gf, anchor, sign](double z, double da, double db) {
            return std::exp(anchor - lp(z, da, db)) / (sign * gf.eval(z, da, db));
        };
        QuadratureOptions qopts;
        qopts.tol = std::max(opts.tol, 1e-11);
        return cnorm * integrate_endpoint_singular(f, qopts).value;
    };
    return piece(state);
}

double density_bin_mass(const FlowSystem& s, const Interval& g, const Normalizers& c, double lo,
                        double hi, const InvariantOptions& opts) {
    return density_state_bin_mass(s, g, c, 0, lo, hi, opts) +
           density_state_bin_mass(s, g, c, 1, lo, hi, opts);
}

std::pair<double, double> mixture_weights(const FlowSystem& s, double x, int i) {
    const auto p = exit_prob_upper(s, x);
    const double pi = (i == 0) ? p.p0 : p.p1;
    return {1.0 - pi, pi};
}

} // namespace telewell
