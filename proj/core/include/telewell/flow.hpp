#pragma once

#include "telewell/potential.hpp"

#include <cmath>
#include <iosfwd>
#include <limits>
#include <vector>

namespace telewell {

struct RatePair {
    double lambda0;
    double lambda1;

    RatePair(double l0, double l1) : lambda0(l0), lambda1(l1) {
        if (!(l0 > 0.0) || !(l1 > 0.0)) throw ConfigError("switching intensities must be positive");
    }
    double min() const { return lambda0 < lambda1 ? lambda0 : lambda1; }
    double sum() const { return lambda0 + lambda1; }
};

enum class EndpointKind { Attracting, Repelling, Open };

/// Maximal interval on which c - U' keeps one sign; the driven flow is
/// monotone here and fixed exactly at the finite endpoints.
struct Branch {
    int velocity_index = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    int direction = 0; // sign of c - U' on the interior
    EndpointKind lo_kind = EndpointKind::Open;
    EndpointKind hi_kind = EndpointKind::Open;
    double clamp_eps = 0.0; // epsilon_attract for this branch

    bool bounded_below() const { return std::isfinite(lo); }
    bool bounded_above() const { return std::isfinite(hi); }
    bool contains_interior(double x) const { return x > lo && x < hi; }
    double length() const { return hi - lo; }
};

struct PhiInverse {
    double value = 0.0;
    bool saturated = false; // clamped against an attracting endpoint
};

/// One branch of a driven flow together with its rectifying map Phi,
/// Phi'(y) = 1/(c - U'(y)), normalized to Phi(reference) = 0. Phi grows to
/// +inf toward an attracting endpoint and to -inf toward a repelling one.
class FlowMap {
public:
    FlowMap(Polynomial gap, Branch branch, double reference_point);

    const Branch& branch() const { return branch_; }
    double reference_point() const { return reference_; }

    double phi(double y) const;
    /// Phi with the distances to the finite branch endpoints supplied
    /// exactly; used by quadrature deep inside endpoint singularities.
    double phi_from_distances(double y, double dist_lo, double dist_hi) const;
    double phi_prime(double y) const { return 1.0 / gap_(y); }
    double velocity_gap(double y) const { return gap_(y); }

    /// Unique y with Phi(y) = s, clamped within clamp_eps of an attracting
    /// endpoint when s lies beyond the representable range.
    PhiInverse phi_inverse(double s, double hint) const;
    PhiInverse phi_inverse(double s) const { return phi_inverse(s, reference_); }

private:
    enum class Form { LogSum, LogAtan, Quadrature };

    double phi_raw(double y) const;
    double phi_raw_dist(double y, double dist_lo, double dist_hi) const;

    Polynomial gap_; // c - U'
    Branch branch_;
    double reference_ = 0.0;
    Form form_ = Form::Quadrature;

    // LogSum: Phi_raw = sum_k coef_k ln|y - root_k|
    std::vector<double> roots_;
    std::vector<double> coefs_;

    // LogAtan: Phi_raw = s * [ln|y-r| - 0.5 ln Q(y) - eta * atan((y+B/2)/w)]
    double la_scale_ = 0.0, la_root_ = 0.0, la_b_ = 0.0, la_c_ = 0.0, la_w_ = 0.0, la_eta_ = 0.0;

    // Quadrature fallback: checkpointed integration of 1/(c - U') with a
    // logarithmic split at the nearest finite endpoint.
    std::vector<double> chk_x_;
    std::vector<double> chk_phi_;
    double lo_log_coef_ = 0.0, hi_log_coef_ = 0.0; // -1/U''(endpoint)
    Polynomial gap_defl_lo_, gap_defl_hi_;

    double phi_offset_ = 0.0; // -phi_raw(reference)
};

/// Branch decomposition of the flow driven at velocity c. Direction and
/// endpoint kinds follow the sign of c - U'.
std::vector<Branch> make_branches(const PotentialSpec& spec, double c, int velocity_index);

/// Everything derived from (U', c0, c1, rates): regime, branch tables and
/// rectifying maps of both driven flows, and the scalar fields built from
/// them. Immutable after construction and safe to share across threads.
class FlowSystem {
public:
    FlowSystem(PotentialSpec spec, VelocityPair velocities, RatePair rates,
               double reference_fraction = 0.5);

    const PotentialSpec& spec() const { return spec_; }
    const Landscape& landscape() const { return landscape_; }
    const Regime& regime() const { return regime_; }
    const VelocityPair& velocities() const { return velocities_; }
    const RatePair& rates() const { return rates_; }
    double reference_fraction() const { return reference_fraction_; }

    double velocity(int i) const { return i == 0 ? velocities_.c0 : velocities_.c1; }
    double rate(int i) const { return i == 0 ? rates_.lambda0 : rates_.lambda1; }
    const std::vector<double>& wells(int i) const { return i == 0 ? regime_.wells0 : regime_.wells1; }

    const std::vector<Branch>& branches(int i) const { return branches_[i]; }
    const FlowMap& flow_map(int i, std::size_t branch_index) const { return maps_[i][branch_index]; }
    /// Index of the branch with lo < x < hi, or -1 when x is a critical point.
    int branch_index(int i, double x) const;
    const FlowMap& flow_map_at(int i, double x) const;
    bool is_critical_point(int i, double x) const { return branch_index(i, x) < 0; }

    double velocity_gap(int i, double x) const { return gap_[i](x); }
    double phi(int i, double x) const { return flow_map_at(i, x).phi(x); }

    /// gamma_i(t, x); critical points are stationary and return themselves.
    double pattern(int i, double t, double x) const;
    /// t_i*(x, y): Phi_i(y) - Phi_i(x) when y is reachable from (x, i),
    /// +inf otherwise, 0 when x == y.
    double reach_time(int i, double x, double y) const;

    /// lambda0/(c0 - U'(x)) + lambda1/(c1 - U'(x)).
    double psi(double x) const;
    /// lambda0 Phi0(x) + lambda1 Phi1(x); additive constant fixed by the
    /// reference convention, so only differences are meaningful.
    double log_psi(double x) const;
    /// Psi(x)/Psi(y) = exp(log_psi(x) - log_psi(y)); convention independent.
    double beta(double x, double y) const;

    /// Invariant attractor interval containing x (G-, G+ or the merged G);
    /// throws WrongRegimeError when x is in no attractor.
    Interval attractor_containing(double x) const;

    /// The reflected system (x -> -x, velocities (-c1,-c0), rates swapped).
    FlowSystem mirrored() const;

    void dump_branches_csv(std::ostream& os) const;
    void dump_phi_samples_csv(std::ostream& os, int samples_per_branch = 64) const;

private:
    PotentialSpec spec_;
    VelocityPair velocities_;
    RatePair rates_;
    double reference_fraction_;
    Landscape landscape_;
    Regime regime_;
    Polynomial gap_[2]; // c_i - U'
    std::vector<Branch> branches_[2];
    std::vector<FlowMap> maps_[2];
};

} // namespace telewell
