#pragma once

#include "telewell/flow.hpp"
#include "telewell/quadrature.hpp"

#include <vector>

namespace telewell {

struct InvariantOptions {
    double tol = 1e-10;
};

/// Normalizers of the stationary density pair on an invariant attractor.
/// C0 and C1 agree up to quadrature error (the zero-flux identity); the
/// redundancy is kept as a consistency check.
struct Normalizers {
    double C0 = 0.0;
    double C1 = 0.0;
    double C0_error = 0.0;
    double C1_error = 0.0;
    QuadratureResult A0, A1; // anchored integrals of Psi^{-1}/(c0-U') and Psi^{-1}/(U'-c1)
    double log_anchor = 0.0;
};

struct InvariantDensity {
    Interval support;
    std::vector<double> grid;
    std::vector<double> pi0;
    std::vector<double> pi1;
    double C0 = 0.0;
    double C1 = 0.0;
    double C0_error = 0.0;
    double C1_error = 0.0;
};

/// Chebyshev-clustered grid of n interior points of G.
std::vector<double> chebyshev_grid(const Interval& g, int n);
/// Uniform grid of n interior points (edges excluded).
std::vector<double> uniform_grid(const Interval& g, int n);

/// C0, C1 from the stated normalization of the state masses. G must be an
/// invariant attractor of the current regime.
Normalizers normalizers(const FlowSystem& system, const Interval& g,
                        const InvariantOptions& opts = {});

/// pi0, pi1 on the given interior grid, evaluated in log space.
InvariantDensity stationary_density(const FlowSystem& system, const Interval& g,
                                    const std::vector<double>& grid,
                                    const InvariantOptions& opts = {});

struct FpResidual {
    double max0 = 0.0;      // max |row 0| over interior grid points
    double max1 = 0.0;
    double density_max = 0.0; // max of pi over the grid, the natural scale
};

/// Residual of the stationary Fokker-Planck system on the grid, first
/// derivatives by (nonuniform) central differences.
FpResidual fokker_planck_residual(const FlowSystem& system, const InvariantDensity& density);

/// Mass of pi_i inside [lo, hi] by singular quadrature.
double density_state_bin_mass(const FlowSystem& system, const Interval& g, const Normalizers& c,
                              int i, double lo, double hi, const InvariantOptions& opts = {});

/// Mass of pi0 + pi1 inside [lo, hi] (for binned comparisons against the
/// occupation histogram).
double density_bin_mass(const FlowSystem& system, const Interval& g, const Normalizers& c,
                        double lo, double hi, const InvariantOptions& opts = {});

/// Long-run weights (1 - p_i(x), p_i(x)) of the two attractor measures for
/// a start in the metastable interval. Derived diagnostic, not a stated
/// result.
std::pair<double, double> mixture_weights(const FlowSystem& system, double x, int i);

} // namespace telewell
