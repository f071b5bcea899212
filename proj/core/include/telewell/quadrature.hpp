#pragma once

#include <cstdint>
#include <functional>

namespace telewell {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t evaluations = 0;
};

/// Declared power-law behavior f ~ K d^alpha at an interval endpoint;
/// alpha > -1 keeps the singularity integrable.
struct EndpointBehavior {
    bool is_regular = true;
    double exponent = 0.0;

    static EndpointBehavior regular() { return {true, 0.0}; }
    static EndpointBehavior power(double alpha) { return {false, alpha}; }
};

/// 1D integrand on an open interval. The evaluator receives the point and
/// its distances to both endpoints, computed without cancellation, so
/// integrable endpoint singularities can be evaluated deep in the tails.
struct Integrand1D {
    std::function<double(double y, double dist_a, double dist_b)> evaluator;
    double a = 0.0;
    double b = 0.0;
    EndpointBehavior at_a = EndpointBehavior::regular();
    EndpointBehavior at_b = EndpointBehavior::regular();
};

struct QuadratureOptions {
    double tol = 1e-10;           // relative, against the L1 mass of the integral
    int max_levels = 12;          // tanh-sinh refinement levels
    bool validate_exponents = true;
};

/// Tanh-sinh (double exponential) quadrature on the open interval (a, b);
/// converges for integrable endpoint singularities. Declared endpoint
/// exponents are checked by a log-log slope probe before integrating.
/// Throws NonConvergentError when the level-to-level difference does not
/// reach the tolerance, ConsistencyError on an exponent mismatch.
QuadratureResult integrate_endpoint_singular(const Integrand1D& integrand,
                                             const QuadratureOptions& opts = {});

/// Adaptive Gauss-Kronrod (G7, K15) with interior bisection; the
/// independent second integration route used in cross checks and as the
/// generic-potential fallback. Handles a > b with the usual sign flip.
QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& f, double a,
                                         double b, double tol, int max_depth = 48);

enum class TriangleOrientation {
    Delta0, // {x < z0 < y, z0 < z1 < y}
    Delta1, // {x < z1 < y, z1 < z0 < y}
};

/// Iterated tanh-sinh integration of kernel(z0, z1) over a triangle hanging
/// off the diagonal between x and y. For x > y both iterated integrals flip
/// sign, which matches the descending closed forms.
QuadratureResult integrate_triangle(const std::function<double(double z0, double z1)>& kernel,
                                    double x, double y, TriangleOrientation orientation,
                                    const QuadratureOptions& opts = {});

/// Triangle variant whose kernel also receives exact distances of the inner
/// variable to its integration endpoints (inner runs from the diagonal to y).
QuadratureResult integrate_triangle_dist(
    const std::function<double(double z_outer, double z_inner, double inner_dist_lo,
                               double inner_dist_hi)>& kernel,
    double x, double y, TriangleOrientation orientation, const QuadratureOptions& opts = {});

} // namespace telewell
