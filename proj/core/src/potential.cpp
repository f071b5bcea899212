#include "telewell/potential.hpp"

#include <algorithm>
#include <cmath>

namespace telewell {

PotentialSpec PotentialSpec::reference_quartic() {
    return PotentialSpec{{0.0, -1.0, 0.0, 1.0}, "quartic"};
}

const char* to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::CaseA: return "CaseA";
        case RegimeTag::CaseBUpper: return "CaseBUpper";
        case RegimeTag::CaseBLower: return "CaseBLower";
        case RegimeTag::CaseC: return "CaseC";
        case RegimeTag::SingleWellHigh: return "SingleWellHigh";
        case RegimeTag::SingleWellLow: return "SingleWellLow";
        case RegimeTag::Degenerate: return "Degenerate";
    }
    return "?";
}

namespace {

void check_shape(const PotentialSpec& spec) {
    const Polynomial up = spec.slope();
    const int deg = up.degree();
    if (deg < 3) throw NotDoubleWellError("degree of U' must be >= 3");
    if (deg % 2 == 0) throw NotDoubleWellError("degree of U' must be odd");
    if (up.leading_coefficient() <= 0.0)
        throw NotDoubleWellError("leading coefficient of U' must be positive");
}

} // namespace

Landscape validate_double_well(const PotentialSpec& spec) {
    if (spec.slope_coefficients.empty()) throw NotDoubleWellError("empty slope coefficient list");
    check_shape(spec);

    const Polynomial up = spec.slope();
    const Polynomial upp = spec.curvature();

    const auto roots = up.real_roots();
    if (roots.has_multiple_root)
        throw NotDoubleWellError("U' has a multiple root");
    if (roots.roots.size() != 3)
        throw NotDoubleWellError("U' must have exactly three simple real roots, found " +
                                 std::to_string(roots.roots.size()));

    Landscape land;
    land.x_minus = roots.roots[0];
    land.x_zero = roots.roots[1];
    land.x_plus = roots.roots[2];

    double curvature_scale = 0.0;
    for (double c : spec.slope_coefficients) curvature_scale += std::abs(c);
    curvature_scale = std::max(curvature_scale, 1.0);
    for (double r : roots.roots) {
        if (std::abs(upp(r)) < 1e-9 * curvature_scale)
            throw DegenerateCurvatureError("U'' vanishes at a critical point of U");
    }

    const auto infl = upp.real_roots();
    land.inflection_points = infl.roots;

    // one slope extremum in each lobe; extra extrema (or extrema in the
    // tails) put the case taxonomy out of reach
    std::vector<double> inside;
    for (double r : infl.roots)
        if (r > land.x_minus && r < land.x_plus) inside.push_back(r);
    if (inside.size() != 2 || infl.roots.size() != 2 || infl.has_multiple_root)
        throw NotDoubleWellError("U' is not unimodal on each side of x0");
    if (!(inside[0] > land.x_minus && inside[0] < land.x_zero &&
          inside[1] > land.x_zero && inside[1] < land.x_plus))
        throw NotDoubleWellError("slope extrema not separated by x0");

    land.V = up(inside[0]);
    land.v = up(inside[1]);
    if (!(land.v < land.V)) throw NotDoubleWellError("slope extrema out of order");
    return land;
}

double degeneracy_tolerance(const Landscape& landscape) {
    return 1e-9 * std::max({1.0, std::abs(landscape.V), std::abs(landscape.v)});
}

std::vector<double> critical_points(const PotentialSpec& spec, double c) {
    const Landscape land = validate_double_well(spec);
    const double tol = degeneracy_tolerance(land);
    if (std::abs(c - land.V) < tol || std::abs(c - land.v) < tol)
        throw DegenerateRootError("c within tolerance of a slope extremum (double root)");

    const auto roots = spec.slope().plus_constant(-c).real_roots();
    if (roots.has_multiple_root)
        throw DegenerateRootError("U' - c has a multiple root");
    return roots.roots;
}

Regime classify_regime(const PotentialSpec& spec, const VelocityPair& velocities) {
    const Landscape land = validate_double_well(spec);
    const double tol = degeneracy_tolerance(land);
    const double c0 = velocities.c0, c1 = velocities.c1;
    const double V = land.V, v = land.v;

    for (double c : {c0, c1}) {
        if (std::abs(c - V) < tol || std::abs(c - v) < tol)
            throw DegenerateError("velocity within tolerance of a slope extremum");
    }

    Regime regime;
    regime.wells0 = critical_points(spec, c0);
    regime.wells1 = critical_points(spec, c1);
    const auto& w0 = regime.wells0;
    const auto& w1 = regime.wells1;

    if (V > c0 && c1 > v) {
        regime.tag = RegimeTag::CaseA;
        // w1 = (a-, a0, a+), w0 = (b-, b0, b+)
        regime.regions.g_minus = Interval{w1[0], w0[0]};
        regime.regions.g_zero = Interval{w0[1], w1[1]};
        regime.regions.g_plus = Interval{w1[2], w0[2]};
    } else if (c0 > V && c1 > v && c1 < V) {
        regime.tag = RegimeTag::CaseBUpper;
        regime.regions.g_plus = Interval{w1[2], w0[0]};
    } else if (V > c0 && c0 > v && v > c1) {
        regime.tag = RegimeTag::CaseBLower;
        regime.regions.g_minus = Interval{w1[0], w0[0]};
    } else if (c0 > V && v > c1) {
        regime.tag = RegimeTag::CaseC;
        regime.regions.g_merged = Interval{w1[0], w0[0]};
    } else if (c1 > V) {
        regime.tag = RegimeTag::SingleWellHigh;
        regime.regions.g_merged = Interval{w1[0], w0[0]};
    } else if (c0 < v) {
        regime.tag = RegimeTag::SingleWellLow;
        regime.regions.g_merged = Interval{w1[0], w0[0]};
    } else {
        throw DegenerateError("velocity pair not classifiable");
    }

    // ordering sanity for the two-attractor case
    if (regime.tag == RegimeTag::CaseA) {
        const double a_m = w1[0], a_0 = w1[1], a_p = w1[2];
        const double b_m = w0[0], b_0 = w0[1], b_p = w0[2];
        if (!(a_m < b_m && b_m < b_0 && b_0 < a_0 && a_0 < a_p && a_p < b_p))
            throw ConsistencyError("case A critical points out of order");
    }
    return regime;
}

PotentialSpec mirrored(const PotentialSpec& spec) {
    PotentialSpec m;
    m.slope_coefficients.resize(spec.slope_coefficients.size());
    for (std::size_t k = 0; k < spec.slope_coefficients.size(); ++k) {
        const double s = (k % 2 == 0) ? -1.0 : 1.0; // -(-1)^k
        m.slope_coefficients[k] = s * spec.slope_coefficients[k];
    }
    m.label = spec.label.empty() ? "mirror" : spec.label + "-mirror";
    return m;
}

} // namespace telewell
