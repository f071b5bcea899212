#pragma once

#include "telewell/flow.hpp"

#include <cmath>
#include <optional>

// Internal helpers shared by the closed-form modules: log-space evaluation
// of Psi and of the velocity-gap factors, endpoint-accurate via the exact
// distances handed over by the tanh-sinh nodes.

namespace telewell::detail {

/// Distance |y - edge|, replaced by the exact quadrature distance when the
/// edge coincides with an integration endpoint.
inline double dist_to(double edge, double y, double int_a, double int_b, double da, double db) {
    if (edge == int_a) return da;
    if (edge == int_b) return db;
    return std::abs(y - edge);
}

/// log Psi = l0 Phi0 + l1 Phi1 on fixed branches of both flows, for points
/// inside one integration interval (int_a, int_b).
struct LogPsi {
    const FlowMap* f0 = nullptr;
    const FlowMap* f1 = nullptr;
    double l0 = 0.0, l1 = 0.0;
    double int_a = 0.0, int_b = 0.0;

    double phi_of(const FlowMap& fm, double y, double da, double db) const {
        const Branch& b = fm.branch();
        const double dlo = b.bounded_below() ? dist_to(b.lo, y, int_a, int_b, da, db) : 1.0;
        const double dhi = b.bounded_above() ? dist_to(b.hi, y, int_a, int_b, da, db) : 1.0;
        return fm.phi_from_distances(y, dlo, dhi);
    }

    double operator()(double y, double da, double db) const {
        return l0 * phi_of(*f0, y, da, db) + l1 * phi_of(*f1, y, da, db);
    }

    double plain(double y) const { return (*this)(y, std::abs(y - int_a), std::abs(y - int_b)); }
};

/// c - U'(z) with the simple zero at `edge` (when present) pulled out by
/// synthetic division, so the factor keeps full relative accuracy there.
/// The sign of (z - edge) is a property of the interval, not of the point:
/// deep quadrature nodes can round onto the edge itself.
struct GapFactor {
    Polynomial gap;
    std::optional<double> edge;
    Polynomial deflated;
    double int_a = 0.0, int_b = 0.0;
    double side = 1.0; // sign of z - edge for z interior to (int_a, int_b)

    static GapFactor make(const Polynomial& gap, std::optional<double> edge, double int_a,
                          double int_b) {
        GapFactor g;
        g.gap = gap;
        g.edge = edge;
        if (edge) {
            g.deflated = gap.deflated(*edge);
            g.side = (*edge <= std::min(int_a, int_b)) ? 1.0 : -1.0;
        }
        g.int_a = int_a;
        g.int_b = int_b;
        return g;
    }

    double eval(double z, double da, double db) const {
        if (!edge) return gap(z);
        const double d = dist_to(*edge, z, int_a, int_b, da, db);
        return side * d * deflated(z);
    }
};

} // namespace telewell::detail
