#include "telewell/passage.hpp"

#include "analytic_common.hpp"
#include "telewell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace telewell {

namespace {

using detail::GapFactor;
using detail::LogPsi;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Psi ~ dist^{-lambda_i / U''(r)} toward a critical point r of flow i.
double psi_exponent_at(const FlowSystem& s, int i, double r) {
    return -s.rate(i) / s.spec().curvature()(r);
}

bool is_well(const FlowSystem& s, int i, double x) {
    for (double r : s.wells(i))
        if (r == x) return true;
    return false;
}

/// Branch of flow i whose closure contains [lo, hi].
const FlowMap& enclosing_map(const FlowSystem& s, int i, double lo, double hi) {
    const double probe = 0.5 * (lo + hi);
    const FlowMap& fm = s.flow_map_at(i, probe);
    const Branch& b = fm.branch();
    if (lo < b.lo || hi > b.hi)
        throw OutOfDomainError("integration interval crosses a critical point of a driven flow");
    return fm;
}

LogPsi log_psi_on(const FlowSystem& s, double x, double y) {
    const double lo = std::min(x, y), hi = std::max(x, y);
    LogPsi lp;
    lp.f0 = &enclosing_map(s, 0, lo, hi);
    lp.f1 = &enclosing_map(s, 1, lo, hi);
    lp.l0 = s.rates().lambda0;
    lp.l1 = s.rates().lambda1;
    lp.int_a = x;
    lp.int_b = y;
    return lp;
}

/// Power-law behavior of exp(logPsi)/gap at an integration endpoint e.
EndpointBehavior psi_endpoint_behavior(const FlowSystem& s, double e, bool gap_vanishes_here) {
    double alpha = 0.0;
    bool power = false;
    for (int j = 0; j < 2; ++j) {
        if (is_well(s, j, e)) {
            alpha += psi_exponent_at(s, j, e);
            power = true;
        }
    }
    if (gap_vanishes_here) {
        alpha -= 1.0;
        power = true;
    }
    return power ? EndpointBehavior::power(alpha) : EndpointBehavior::regular();
}

Polynomial gap_poly(const FlowSystem& s, int i) {
    return s.spec().slope().plus_constant(-s.velocity(i)).negated();
}

} // namespace

// ---------------------------------------------------------------------------
// I and J

QuadratureResult I_integral(int i, const FlowSystem& s, double x, double y,
                            const PassageOptions& opts) {
    if (x == y) return {};

    // Psi(y) = +inf kills beta(., y); Psi(y) -> 0 makes it blow up.
    if (s.is_critical_point(0, y) || s.is_critical_point(1, y)) {
        double exponent = 0.0; // of Psi in the distance to y
        for (int j = 0; j < 2; ++j)
            if (is_well(s, j, y)) exponent += psi_exponent_at(s, j, y);
        if (exponent < 0.0) return {}; // Psi -> +inf at y: beta(., y) == 0
        throw NonConvergentError("I integral: Psi vanishes at the target level");
    }

    const LogPsi lp = log_psi_on(s, x, y);
    const double log_psi_y = s.log_psi(y);

    std::optional<double> edge;
    if (is_well(s, i, x)) edge = x;
    GapFactor gap = GapFactor::make(gap_poly(s, i), edge, x, y);

    Integrand1D f;
    f.a = x;
    f.b = y;
    f.evaluator = [&lp, &gap, log_psi_y](double z, double da, double db) {
        return std::exp(lp(z, da, db) - log_psi_y) / gap.eval(z, da, db);
    };
    f.at_a = psi_endpoint_behavior(s, x, edge.has_value());
    f.at_b = EndpointBehavior::regular(); // y interior to both flows here

    QuadratureOptions qopts;
    qopts.tol = opts.tol_1d;
    return integrate_endpoint_singular(f, qopts);
}

QuadratureResult J_integral(int i, const FlowSystem& s, double x, double y,
                            const PassageOptions& opts) {
    if (x == y) return {};
    const LogPsi lp = log_psi_on(s, x, y);

    // the inner variable runs from the diagonal to y; only y can sit at a
    // critical point there
    const int inner_flow = (i == 0) ? 1 : 0;
    const Polynomial inner_gap = gap_poly(s, inner_flow);
    const Polynomial outer_gap = gap_poly(s, i);
    const bool inner_edge_at_y = is_well(s, inner_flow, y);
    const Polynomial inner_gap_defl = inner_edge_at_y ? inner_gap.deflated(y) : Polynomial{};

    // Phi of the inner variable with the distance to y supplied exactly;
    // the diagonal endpoint is interior to every branch involved.
    auto phi_inner = [&](const FlowMap& fm, double z, double dist_y) {
        const Branch& b = fm.branch();
        double dlo = 1.0, dhi = 1.0;
        if (b.bounded_below()) dlo = (b.lo == y) ? dist_y : std::abs(z - b.lo);
        if (b.bounded_above()) dhi = (b.hi == y) ? dist_y : std::abs(z - b.hi);
        return fm.phi_from_distances(z, dlo, dhi);
    };
    auto log_psi_inner = [&](double z, double dist_y) {
        return lp.l0 * phi_inner(*lp.f0, z, dist_y) + lp.l1 * phi_inner(*lp.f1, z, dist_y);
    };
    // sign of (z - y) for inner points; fixed by the sweep orientation
    const double inner_side = (x < y) ? -1.0 : 1.0;
    auto inner_gap_eval = [&](double z, double dist_y) {
        if (!inner_edge_at_y) return inner_gap(z);
        return inner_side * dist_y * inner_gap_defl(z);
    };

    auto kernel = [&](double z0, double z1, double /*dlo*/, double dhi) {
        const double z_in = (i == 0) ? z1 : z0;
        const double z_out = (i == 0) ? z0 : z1;
        const double l_in = log_psi_inner(z_in, dhi);
        const double l_out = lp.plain(z_out);
        const double g_in = inner_gap_eval(z_in, dhi);
        const double g_out = outer_gap(z_out);
        // J0 kernel carries beta(z0, z1), J1 carries beta(z1, z0); in both
        // cases the numerator Psi belongs to the outer variable
        return std::exp(l_out - l_in) / (g_in * g_out);
    };

    QuadratureOptions qopts;
    qopts.tol = opts.tol_2d;
    return integrate_triangle_dist(kernel, x, y,
                                   i == 0 ? TriangleOrientation::Delta0
                                          : TriangleOrientation::Delta1,
                                   qopts);
}

// ---------------------------------------------------------------------------
// exit probabilities (case A, G0)

ExitProbabilities exit_prob_upper(const FlowSystem& s, double x, const PassageOptions& opts) {
    const Regime& regime = s.regime();
    if (regime.tag != RegimeTag::CaseA)
        throw WrongRegimeError("exit probabilities need the two-attractor regime");
    const Interval g0 = *regime.regions.g_zero;
    if (!g0.contains_interior(x))
        throw OutOfIntervalError("x must lie inside the metastable interval (b0, a0)");
    const double b0 = g0.lo, a0 = g0.hi;

    const LogPsi lp_full = log_psi_on(s, b0, a0);
    const double anchor = lp_full.plain(g0.midpoint());

    const double alpha_b0 = psi_exponent_at(s, 0, b0); // Psi ~ d^{alpha} at b0
    const double alpha_a0 = psi_exponent_at(s, 1, a0);

    // integrate exp(logPsi - anchor) / (c_i - U') over (lo, hi)
    auto integrate = [&](int i, double lo, double hi, EndpointBehavior ba, EndpointBehavior bb) {
        LogPsi lp = lp_full;
        lp.int_a = lo;
        lp.int_b = hi;
        std::optional<double> edge;
        if (is_well(s, i, lo)) edge = lo;
        if (is_well(s, i, hi)) edge = hi;
        GapFactor gf = GapFactor::make(gap_poly(s, i), edge, lo, hi);
        Integrand1D f;
        f.a = lo;
        f.b = hi;
        f.at_a = ba;
        f.at_b = bb;
        f.evaluator = [lp, gf, anchor](double z, double da, double db) {
            return std::exp(lp(z, da, db) - anchor) / gf.eval(z, da, db);
        };
        QuadratureOptions qopts;
        qopts.tol = opts.tol_1d;
        return integrate_endpoint_singular(f, qopts);
    };

    ExitProbabilities out;
    out.log_anchor = anchor;
    out.B0 = integrate(0, b0, a0, EndpointBehavior::power(alpha_b0 - 1.0),
                       EndpointBehavior::power(alpha_a0));
    out.B1 = integrate(1, b0, a0, EndpointBehavior::power(alpha_b0),
                       EndpointBehavior::power(alpha_a0 - 1.0));
    const QuadratureResult n0 =
        integrate(0, x, a0, EndpointBehavior::regular(), EndpointBehavior::power(alpha_a0));
    const QuadratureResult n1 =
        integrate(1, b0, x, EndpointBehavior::power(alpha_b0), EndpointBehavior::regular());

    if (!(out.B0.value > 0.0)) throw ConsistencyError("B0 must be positive on G0");
    if (!(out.B1.value < 0.0)) throw ConsistencyError("B1 must be negative on G0");

    out.p0 = 1.0 - n0.value / out.B0.value;
    out.p1 = n1.value / out.B1.value;
    auto rel = [](const QuadratureResult& r) {
        return r.value != 0.0 ? std::abs(r.error_estimate / r.value) : 0.0;
    };
    out.p0_error = std::abs(n0.value / out.B0.value) * (rel(n0) + rel(out.B0));
    out.p1_error = std::abs(out.p1) * (rel(n1) + rel(out.B1));

    // clamped into [0,1] only within the reported quadrature error
    for (auto [p, err] : {std::pair{&out.p0, out.p0_error}, std::pair{&out.p1, out.p1_error}}) {
        const double slack = std::max(err, 1e-12);
        if (*p < -slack || *p > 1.0 + slack)
            throw ConsistencyError("exit probability escapes [0,1] beyond quadrature error");
        *p = std::clamp(*p, 0.0, 1.0);
    }
    return out;
}

std::pair<double, double> exit_prob_ode_residual(const FlowSystem& s, double x, double h,
                                                 const PassageOptions& opts) {
    const auto pm = exit_prob_upper(s, x - h, opts);
    const auto pc = exit_prob_upper(s, x, opts);
    const auto pp = exit_prob_upper(s, x + h, opts);
    const double dp0 = (pp.p0 - pm.p0) / (2.0 * h);
    const double dp1 = (pp.p1 - pm.p1) / (2.0 * h);
    const double g0 = s.velocity_gap(0, x), g1 = s.velocity_gap(1, x);
    const double l0 = s.rates().lambda0, l1 = s.rates().lambda1;
    return {g0 * dp0 - l0 * pc.p0 + l0 * pc.p1, g1 * dp1 + l1 * pc.p0 - l1 * pc.p1};
}

// ---------------------------------------------------------------------------
// mean passage dispatch

const char* to_string(PassageCase c) {
    switch (c) {
        case PassageCase::Trivial: return "trivial";
        case PassageCase::ZeroBoundary: return "zero-boundary";
        case PassageCase::EntryAnchor: return "entry-anchor";
        case PassageCase::EntryPrinted: return "entry-printed";
        case PassageCase::ExitAnchor: return "exit-anchor";
        case PassageCase::ExitPrinted: return "exit-printed";
    }
    return "?";
}

namespace {

struct UpperGeometry {
    double a_plus = 0.0;  // lower attracting edge (a+ or the merged a)
    double b_plus = 0.0;  // upper attracting edge (b+ or the merged b)
    double floor = -kInf; // a0 where a repelling boundary exists below
};

UpperGeometry upper_geometry(const FlowSystem& s) {
    const Regime& r = s.regime();
    UpperGeometry g;
    switch (r.tag) {
        case RegimeTag::CaseA:
            g.a_plus = r.wells1[2];
            g.b_plus = r.wells0[2];
            g.floor = r.wells1[1];
            break;
        case RegimeTag::CaseBUpper:
            g.a_plus = r.wells1[2];
            g.b_plus = r.wells0[0];
            g.floor = r.wells1[1];
            break;
        case RegimeTag::CaseC:
        case RegimeTag::SingleWellHigh:
        case RegimeTag::SingleWellLow:
            g.a_plus = r.wells1[0];
            g.b_plus = r.wells0[0];
            break;
        default:
            throw WrongRegimeError("no upper-attractor geometry in this regime");
    }
    return g;
}

MeanPassage mean_passage_upper(const FlowSystem& s, double x, double y,
                               const PassageOptions& opts) {
    const UpperGeometry g = upper_geometry(s);
    const double l0 = s.rates().lambda0, l1 = s.rates().lambda1;
    const double lam = l0 + l1;

    MeanPassage out;
    if (x == y) {
        out.case_tag = PassageCase::Trivial;
        return out;
    }
    if (x < g.floor) throw AmbiguousCaseError("start below a0: no stated closed form");

    if (x < y) {
        if (y >= g.b_plus) throw InfiniteMeanError("ascent to y >= b+ never completes");
        if (y < g.a_plus) {
            out.case_tag = PassageCase::ZeroBoundary;
        } else if (y == g.a_plus) {
            out.case_tag = PassageCase::EntryAnchor;
        } else {
            if (x <= g.a_plus)
                throw AmbiguousCaseError(
                    "ascent across a+ to an interior target: the stated integrals do not "
                    "converge there");
            out.case_tag = PassageCase::EntryPrinted;
            out.notes.push_back(
                "interior target above a+: formula as printed; its boundary value at "
                "x -> y is not anchored by the source analysis");
        }
    } else {
        if (y > g.b_plus) {
            out.case_tag = PassageCase::ZeroBoundary;
        } else if (y == g.b_plus) {
            out.case_tag = PassageCase::ExitAnchor;
        } else if (y > g.a_plus) {
            out.case_tag = PassageCase::ExitPrinted;
            out.notes.push_back(
                "descending case evaluates the printed formula at b+, independent of y");
        } else {
            throw InfiniteMeanError("descent to y <= a+ never completes");
        }
    }

    switch (out.case_tag) {
        case PassageCase::ZeroBoundary:
            out.I0 = I_integral(0, s, x, y, opts);
            out.I1 = I_integral(1, s, x, y, opts);
            out.J0 = J_integral(0, s, x, y, opts);
            out.J1 = J_integral(1, s, x, y, opts);
            out.m0 = out.I0.value + lam * out.J0.value;
            out.m1 = out.I1.value + lam * out.J1.value;
            out.m0_error = out.I0.error_estimate + lam * out.J0.error_estimate;
            out.m1_error = out.I1.error_estimate + lam * out.J1.error_estimate;
            break;
        case PassageCase::EntryAnchor:
            // beta(., a+) vanishes identically, so the I terms drop out
            out.J0 = J_integral(0, s, x, g.a_plus, opts);
            out.J1 = J_integral(1, s, x, g.a_plus, opts);
            out.m0 = lam * out.J0.value;
            out.m1 = 1.0 / l1 + lam * out.J1.value;
            out.m0_error = lam * out.J0.error_estimate;
            out.m1_error = lam * out.J1.error_estimate;
            break;
        case PassageCase::EntryPrinted:
            out.I0 = I_integral(0, s, x, y, opts);
            out.J0 = J_integral(0, s, x, y, opts);
            out.J1 = J_integral(1, s, x, y, opts);
            out.m0 = (1.0 + l0 / l1) * out.I0.value + lam * out.J0.value;
            out.m1 = 1.0 / l1 + lam * out.J1.value;
            out.m0_error = (1.0 + l0 / l1) * out.I0.error_estimate + lam * out.J0.error_estimate;
            out.m1_error = lam * out.J1.error_estimate;
            break;
        case PassageCase::ExitAnchor:
        case PassageCase::ExitPrinted:
            // I1(x, b+) vanishes identically for the same reason
            out.J0 = J_integral(0, s, x, g.b_plus, opts);
            out.J1 = J_integral(1, s, x, g.b_plus, opts);
            out.m0 = 1.0 / l0 + lam * out.J0.value;
            out.m1 = lam * out.J1.value;
            out.m0_error = lam * out.J0.error_estimate;
            out.m1_error = lam * out.J1.error_estimate;
            break;
        case PassageCase::Trivial:
            break;
    }

    if (out.m0 < -out.m0_error || out.m1 < -out.m1_error) {
        if (out.case_tag == PassageCase::EntryPrinted || out.case_tag == PassageCase::ExitPrinted)
            throw AmbiguousCaseError(
                "the printed interior formula yields a negative mean here; it is proven "
                "only at the attractor edge (see case notes)");
        throw ConsistencyError("mean passage time negative beyond quadrature error");
    }
    out.m0 = std::max(out.m0, 0.0);
    out.m1 = std::max(out.m1, 0.0);
    return out;
}

} // namespace

MeanPassage mean_passage(const FlowSystem& s, double x, double y, const PassageOptions& opts) {
    if (x == y) {
        MeanPassage out;
        out.case_tag = PassageCase::Trivial;
        return out;
    }
    const Regime& r = s.regime();
    bool mirror = false;
    switch (r.tag) {
        case RegimeTag::CaseA: {
            const Interval g0 = *r.regions.g_zero;
            if (g0.contains_interior(x))
                throw InfiniteMeanError(
                    "start inside the metastable interval: the passage time is defective");
            mirror = x <= g0.lo;
            break;
        }
        case RegimeTag::CaseBUpper:
        case RegimeTag::CaseC:
        case RegimeTag::SingleWellHigh:
        case RegimeTag::SingleWellLow:
            mirror = false;
            break;
        case RegimeTag::CaseBLower:
            mirror = true;
            break;
        default:
            throw WrongRegimeError("mean passage not defined in this regime");
    }
    if (!mirror) return mean_passage_upper(s, x, y, opts);

    const FlowSystem ms = s.mirrored();
    MeanPassage m = mean_passage_upper(ms, -x, -y, opts);
    std::swap(m.m0, m.m1);
    std::swap(m.m0_error, m.m1_error);
    std::swap(m.I0, m.I1);
    std::swap(m.J0, m.J1);
    m.mirrored = true;
    return m;
}

std::pair<double, double> mean_passage_ode_residual(const FlowSystem& s, double x, double y,
                                                    double h, const PassageOptions& opts) {
    const MeanPassage mm = mean_passage(s, x - h, y, opts);
    const MeanPassage mc = mean_passage(s, x, y, opts);
    const MeanPassage mp = mean_passage(s, x + h, y, opts);
    if (mm.case_tag != mc.case_tag || mp.case_tag != mc.case_tag)
        throw AmbiguousCaseError("finite-difference stencil crosses a case boundary");
    const double d0 = (mp.m0 - mm.m0) / (2.0 * h);
    const double d1 = (mp.m1 - mm.m1) / (2.0 * h);
    const double g0 = s.velocity_gap(0, x), g1 = s.velocity_gap(1, x);
    const double l0 = s.rates().lambda0, l1 = s.rates().lambda1;
    return {g0 * d0 - l0 * mc.m0 + l0 * mc.m1 + 1.0, g1 * d1 + l1 * mc.m0 - l1 * mc.m1 + 1.0};
}

std::pair<double, double> mean_passage_v_residual(const FlowSystem& s, double x, double y,
                                                  double h, const PassageOptions& opts) {
    // v_i = (c_i - U') dm_i/dx must satisfy dv_i/dx = psi v_i + (l0+l1)/(c_{1-i} - U')
    double m0s[5], m1s[5];
    PassageCase tag = PassageCase::Trivial;
    for (int k = -2; k <= 2; ++k) {
        const MeanPassage m = mean_passage(s, x + k * h, y, opts);
        if (k == -2) tag = m.case_tag;
        else if (m.case_tag != tag)
            throw AmbiguousCaseError("finite-difference stencil crosses a case boundary");
        m0s[k + 2] = m.m0;
        m1s[k + 2] = m.m1;
    }
    auto v_at = [&](int k) { // k in {-1, 0, 1}
        const double z = x + k * h;
        const double dm0 = (m0s[k + 3] - m0s[k + 1]) / (2.0 * h);
        const double dm1 = (m1s[k + 3] - m1s[k + 1]) / (2.0 * h);
        return std::pair{s.velocity_gap(0, z) * dm0, s.velocity_gap(1, z) * dm1};
    };
    const auto vm = v_at(-1), vc = v_at(0), vp = v_at(1);
    const double dv0 = (vp.first - vm.first) / (2.0 * h);
    const double dv1 = (vp.second - vm.second) / (2.0 * h);
    const double lam = s.rates().sum();
    return {dv0 - s.psi(x) * vc.first - lam / s.velocity_gap(1, x),
            dv1 - s.psi(x) * vc.second - lam / s.velocity_gap(0, x)};
}

std::vector<BatchRow> run_batch(const FlowSystem& s, const BatchRequest& req,
                                const PassageOptions& opts) {
    std::vector<BatchRow> rows;
    rows.reserve(req.xs.size());
    for (double x : req.xs) {
        BatchRow row;
        row.x = x;
        if (req.quantity == "exit_prob") {
            const auto p = exit_prob_upper(s, x, opts);
            row.v0 = p.p0;
            row.v1 = p.p1;
            row.err0 = p.p0_error;
            row.err1 = p.p1_error;
            row.case_tag = "G0";
        } else if (req.quantity == "mfpt") {
            const auto m = mean_passage(s, x, req.y, opts);
            row.v0 = m.m0;
            row.v1 = m.m1;
            row.err0 = m.m0_error;
            row.err1 = m.m1_error;
            row.case_tag = to_string(m.case_tag);
            if (m.mirrored) row.case_tag += "-mirrored";
        } else {
            throw ConfigError("batch quantity must be exit_prob or mfpt");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace telewell
