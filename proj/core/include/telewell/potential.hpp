#pragma once

#include "telewell/errors.hpp"
#include "telewell/polynomial.hpp"

#include <optional>
#include <string>
#include <vector>

namespace telewell {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool contains_interior(double x) const { return x > lo && x < hi; }
};

/// A double-well potential U, specified through the coefficients of its
/// slope U' (ascending degree). U itself is reconstructed only for
/// reporting, with U(0) = 0.
struct PotentialSpec {
    std::vector<double> slope_coefficients;
    std::string label;

    Polynomial slope() const { return Polynomial(slope_coefficients); }
    Polynomial curvature() const { return slope().derivative(); }
    double potential(double x) const { return slope().antiderivative()(x); }

    /// U' = x^3 - x, the symmetric quartic well used throughout the tests.
    static PotentialSpec reference_quartic();
};

struct Landscape {
    double x_minus = 0.0, x_zero = 0.0, x_plus = 0.0; // roots of U'
    double v = 0.0;                                   // local minimum of U'
    double V = 0.0;                                   // local maximum of U'
    std::vector<double> inflection_points;            // roots of U''
};

struct VelocityPair {
    double c0;
    double c1;

    VelocityPair(double c0_, double c1_) : c0(c0_), c1(c1_) {
        if (!(c0 > c1)) throw ConfigError("VelocityPair requires c0 > c1");
    }
};

enum class RegimeTag {
    CaseA,         // V > c0 > c1 > v : two attractors and a metastable interval
    CaseBUpper,    // c0 > V > c1 > v : single attractor G+
    CaseBLower,    // V > c0 > v > c1 : single attractor G-
    CaseC,         // c0 > V > v > c1 : merged attractor
    SingleWellHigh,// c0 > c1 > V
    SingleWellLow, // v > c0 > c1
    Degenerate,    // only used in error reporting; classify_regime throws instead
};

const char* to_string(RegimeTag tag);

struct Regions {
    std::optional<Interval> g_minus;  // [a-, b-]
    std::optional<Interval> g_plus;   // [a+, b+]
    std::optional<Interval> g_zero;   // (b0, a0)
    std::optional<Interval> g_merged; // [a, b] for single-attractor regimes
};

struct Regime {
    RegimeTag tag = RegimeTag::Degenerate;
    std::vector<double> wells0; // critical points of U0 = U - c0 x, ascending
    std::vector<double> wells1; // critical points of U1 = U - c1 x, ascending
    Regions regions;
};

/// Validates the double-well shape and locates all critical structure.
/// Throws NotDoubleWellError / DegenerateCurvatureError.
Landscape validate_double_well(const PotentialSpec& spec);

/// All real simple roots of U'(x) = c in ascending order. Throws
/// DegenerateRootError when c sits within tolerance of V or v.
std::vector<double> critical_points(const PotentialSpec& spec, double c);

/// Case classification of (c0, c1) against the slope extrema, with the
/// region intervals populated per case. Throws DegenerateError on the
/// boundaries of the case diagram.
Regime classify_regime(const PotentialSpec& spec, const VelocityPair& velocities);

/// |c - V| or |c - v| below this is treated as degenerate.
double degeneracy_tolerance(const Landscape& landscape);

/// Reflection x -> -x of the slope specification: U'_m(x) = -U'(-x).
/// The reflected process with velocities (-c1, -c0) and swapped rates is
/// distributionally the mirror image of the original.
PotentialSpec mirrored(const PotentialSpec& spec);

} // namespace telewell
