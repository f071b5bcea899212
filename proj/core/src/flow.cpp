#include "telewell/flow.hpp"

#include "telewell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace telewell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double branch_clamp_eps(const Branch& b) {
    const double scale = (b.bounded_below() && b.bounded_above()) ? b.length() : 1.0;
    return 1e-13 * scale;
}

} // namespace

std::vector<Branch> make_branches(const PotentialSpec& spec, double c, int velocity_index) {
    const auto roots = critical_points(spec, c); // throws DegenerateRootError on double roots
    const Polynomial gap = spec.slope().plus_constant(-c).negated();

    std::vector<Branch> out;
    std::vector<double> edges;
    edges.push_back(-kInf);
    for (double r : roots) edges.push_back(r);
    edges.push_back(kInf);

    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        Branch b;
        b.velocity_index = velocity_index;
        b.lo = edges[k];
        b.hi = edges[k + 1];
        double probe;
        if (!b.bounded_below()) probe = b.hi - 1.0;
        else if (!b.bounded_above()) probe = b.lo + 1.0;
        else probe = 0.5 * (b.lo + b.hi);
        b.direction = gap(probe) > 0.0 ? 1 : -1;
        // the endpoint the pattern moves toward is attracting
        b.lo_kind = !b.bounded_below() ? EndpointKind::Open
                                       : (b.direction < 0 ? EndpointKind::Attracting : EndpointKind::Repelling);
        b.hi_kind = !b.bounded_above() ? EndpointKind::Open
                                       : (b.direction > 0 ? EndpointKind::Attracting : EndpointKind::Repelling);
        b.clamp_eps = branch_clamp_eps(b);
        out.push_back(b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// FlowMap

FlowMap::FlowMap(Polynomial gap, Branch branch, double reference_point)
    : gap_(std::move(gap)), branch_(branch), reference_(reference_point) {
    const auto roots = gap_.real_roots();
    const int deg = gap_.degree();

    if (!roots.has_multiple_root && static_cast<int>(roots.roots.size()) == deg) {
        // all roots real and simple: Phi = sum 1/q'(r_k) ln|y - r_k|
        form_ = Form::LogSum;
        roots_ = roots.roots;
        coefs_.resize(roots_.size());
        for (std::size_t k = 0; k < roots_.size(); ++k)
            coefs_[k] = 1.0 / gap_.derivative_at(roots_[k]);
    } else if (deg == 3 && roots.roots.size() == 1 && !roots.has_multiple_root) {
        // one real root and an irreducible quadratic factor
        form_ = Form::LogAtan;
        const double r = roots.roots[0];
        la_root_ = r;
        const Polynomial lq = gap_.deflated(r); // L * (y^2 + B y + C)
        const double L = lq.coefficients()[2];
        la_b_ = lq.coefficients()[1] / L;
        la_c_ = lq.coefficients()[0] / L;
        la_w_ = std::sqrt(la_c_ - 0.25 * la_b_ * la_b_);
        la_scale_ = 1.0 / (L * (la_c_ + la_b_ * r + r * r)); // a / L with a = 1/Q(r)
        la_eta_ = (r + 0.5 * la_b_) / la_w_;
    } else {
        // generic fallback: checkpointed quadrature with logarithmic
        // endpoint splits
        form_ = Form::Quadrature;
        if (branch_.bounded_below()) {
            lo_log_coef_ = 1.0 / gap_.derivative_at(branch_.lo);
            gap_defl_lo_ = gap_.deflated(branch_.lo);
        }
        if (branch_.bounded_above()) {
            hi_log_coef_ = 1.0 / gap_.derivative_at(branch_.hi);
            gap_defl_hi_ = gap_.deflated(branch_.hi);
        }
        // interior anchors, denser toward finite endpoints
        const int n = 17;
        chk_x_.reserve(n);
        for (int k = 0; k < n; ++k) {
            const double u = (k + 0.5) / n; // (0,1)
            double x;
            if (branch_.bounded_below() && branch_.bounded_above()) {
                const double t = 0.5 - 0.5 * std::cos(u * 3.14159265358979323846);
                x = branch_.lo + t * branch_.length();
            } else if (branch_.bounded_below()) {
                x = branch_.lo + std::tan(u * 1.55);
            } else if (branch_.bounded_above()) {
                x = branch_.hi - std::tan(u * 1.55);
            } else {
                x = std::tan((u - 0.5) * 3.0);
            }
            chk_x_.push_back(x);
        }
        std::sort(chk_x_.begin(), chk_x_.end());
        chk_phi_.assign(chk_x_.size(), 0.0);
        // fill by integrating between consecutive anchors (offset applied later)
        for (std::size_t k = 1; k < chk_x_.size(); ++k) {
            const auto piece = integrate_gauss_kronrod(
                [this](double z) { return 1.0 / gap_(z); }, chk_x_[k - 1], chk_x_[k], 1e-13);
            chk_phi_[k] = chk_phi_[k - 1] + piece.value;
        }
    }
    phi_offset_ = 0.0;
    phi_offset_ = -phi_raw(reference_);
}

double FlowMap::phi_raw(double y) const {
    switch (form_) {
        case Form::LogSum: {
            double s = 0.0;
            for (std::size_t k = 0; k < roots_.size(); ++k)
                s += coefs_[k] * std::log(std::abs(y - roots_[k]));
            return s;
        }
        case Form::LogAtan: {
            const double q = (y + la_b_ * 0.5);
            const double Q = y * y + la_b_ * y + la_c_;
            return la_scale_ * (std::log(std::abs(y - la_root_)) - 0.5 * std::log(Q) -
                                la_eta_ * std::atan(q / la_w_));
        }
        case Form::Quadrature: {
            // integrate from the nearest anchor, peeling off the endpoint
            // logarithm when y is close to a finite endpoint
            const auto it = std::min_element(chk_x_.begin(), chk_x_.end(), [y](double a, double b) {
                return std::abs(a - y) < std::abs(b - y);
            });
            const std::size_t k = static_cast<std::size_t>(it - chk_x_.begin());
            const double x0 = chk_x_[k];
            const double span = branch_.bounded_below() && branch_.bounded_above()
                                    ? branch_.length()
                                    : 1.0;
            const bool near_lo = branch_.bounded_below() && (y - branch_.lo) < 0.05 * span;
            const bool near_hi = branch_.bounded_above() && (branch_.hi - y) < 0.05 * span;
            if (near_lo || near_hi) {
                const double e = near_lo ? branch_.lo : branch_.hi;
                const double lc = near_lo ? lo_log_coef_ : hi_log_coef_;
                const Polynomial& defl = near_lo ? gap_defl_lo_ : gap_defl_hi_;
                // 1/q - lc/(y-e) is bounded; integrate it and add the log
                const auto rest = integrate_gauss_kronrod(
                    [&](double z) {
                        const double d = defl(z);
                        return (1.0 - lc * d) / (d * (z - e));
                    },
                    x0, y, 1e-13);
                return chk_phi_[k] + lc * (std::log(std::abs(y - e)) - std::log(std::abs(x0 - e))) +
                       rest.value;
            }
            const auto piece =
                integrate_gauss_kronrod([this](double z) { return 1.0 / gap_(z); }, x0, y, 1e-13);
            return chk_phi_[k] + piece.value;
        }
    }
    return 0.0;
}

double FlowMap::phi_raw_dist(double y, double dist_lo, double dist_hi) const {
    switch (form_) {
        case Form::LogSum: {
            double s = 0.0;
            for (std::size_t k = 0; k < roots_.size(); ++k) {
                double d;
                if (roots_[k] == branch_.lo) d = dist_lo;
                else if (roots_[k] == branch_.hi) d = dist_hi;
                else d = std::abs(y - roots_[k]);
                s += coefs_[k] * std::log(d);
            }
            return s;
        }
        case Form::LogAtan: {
            double d = std::abs(y - la_root_);
            if (la_root_ == branch_.lo) d = dist_lo;
            else if (la_root_ == branch_.hi) d = dist_hi;
            const double q = (y + la_b_ * 0.5);
            const double Q = y * y + la_b_ * y + la_c_;
            return la_scale_ * (std::log(d) - 0.5 * std::log(Q) - la_eta_ * std::atan(q / la_w_));
        }
        case Form::Quadrature: {
            // endpoint log is the only singular part; reuse the split with
            // the exact distance
            if (branch_.bounded_below() && dist_lo < 0.05) {
                const double x0 = chk_x_.front();
                const auto rest = integrate_gauss_kronrod(
                    [&](double z) {
                        const double d = gap_defl_lo_(z);
                        return (1.0 - lo_log_coef_ * d) / (d * (z - branch_.lo));
                    },
                    x0, y, 1e-13);
                return chk_phi_.front() +
                       lo_log_coef_ * (std::log(dist_lo) - std::log(x0 - branch_.lo)) + rest.value;
            }
            if (branch_.bounded_above() && dist_hi < 0.05) {
                const double x0 = chk_x_.back();
                const auto rest = integrate_gauss_kronrod(
                    [&](double z) {
                        const double d = gap_defl_hi_(z);
                        return (1.0 - hi_log_coef_ * d) / (d * (z - branch_.hi));
                    },
                    x0, y, 1e-13);
                return chk_phi_.back() +
                       hi_log_coef_ * (std::log(dist_hi) - std::log(branch_.hi - x0)) + rest.value;
            }
            return phi_raw(y);
        }
    }
    return 0.0;
}

double FlowMap::phi(double y) const {
    if (!branch_.contains_interior(y)) throw OutOfBranchError("phi: position outside branch");
    return phi_raw(y) + phi_offset_;
}

double FlowMap::phi_from_distances(double y, double dist_lo, double dist_hi) const {
    return phi_raw_dist(y, dist_lo, dist_hi) + phi_offset_;
}

PhiInverse FlowMap::phi_inverse(double s, double hint) const {
    // Phi is monotone with sign = direction; forward evolution moves toward
    // the attracting (or open) endpoint where Phi -> +inf, so only that side
    // can saturate.
    const int dir = branch_.direction;
    double ylo, yhi; // working bracket, interior
    const double eps = branch_.clamp_eps;

    double lo_bound = branch_.lo, hi_bound = branch_.hi;
    if (branch_.bounded_below()) lo_bound = branch_.lo + eps;
    if (branch_.bounded_above()) hi_bound = branch_.hi - eps;

    // expand an unbounded side until it encloses s
    auto phi_of = [this](double y) { return phi_raw(y) + phi_offset_; };
    if (!std::isfinite(lo_bound)) {
        double probe = std::min(hint, (branch_.bounded_above() ? branch_.hi : 0.0) - 1.0);
        double step = 1.0;
        // Phi(y) * dir decreases toward the open lower end
        while ((phi_of(probe) - s) * dir > 0.0 && step < 1e18) {
            probe -= step;
            step *= 2.0;
        }
        lo_bound = probe;
    }
    if (!std::isfinite(hi_bound)) {
        double probe = std::max(hint, (branch_.bounded_below() ? branch_.lo : 0.0) + 1.0);
        double step = 1.0;
        while ((phi_of(probe) - s) * dir < 0.0 && step < 1e18) {
            probe += step;
            step *= 2.0;
        }
        hi_bound = probe;
    }

    // saturation check against the boundary values
    const double phi_lo = phi_of(lo_bound);
    const double phi_hi = phi_of(hi_bound);
    // ascending in y when dir > 0
    if (dir > 0) {
        if (s >= phi_hi) return {hi_bound, branch_.bounded_above()};
        if (s <= phi_lo) return {lo_bound, false};
    } else {
        if (s >= phi_lo) return {lo_bound, branch_.bounded_below()};
        if (s <= phi_hi) return {hi_bound, false};
    }

    ylo = lo_bound;
    yhi = hi_bound;
    double y = std::clamp(hint, ylo, yhi);
    for (int it = 0; it < 200; ++it) {
        const double f = phi_of(y) - s;
        if (f == 0.0) return {y, false};
        if ((f > 0.0) == (dir > 0)) yhi = y; else ylo = y;
        // Newton step dy = -f * (c - U'), bisection when it leaves the bracket
        double yn = y - f * gap_(y);
        const bool newton_ok = (yn > ylo && yn < yhi);
        if (!newton_ok) yn = 0.5 * (ylo + yhi);
        const double tol = 1e-15 * std::max(1.0, std::abs(yn));
        if (newton_ok && std::abs(yn - y) <= tol) return {yn, false};
        if (yhi - ylo <= tol) return {0.5 * (ylo + yhi), false};
        y = yn;
    }
    return {y, false};
}

// ---------------------------------------------------------------------------
// FlowSystem

FlowSystem::FlowSystem(PotentialSpec spec, VelocityPair velocities, RatePair rates,
                       double reference_fraction)
    : spec_(std::move(spec)),
      velocities_(velocities),
      rates_(rates),
      reference_fraction_(reference_fraction),
      landscape_(validate_double_well(spec_)),
      regime_(classify_regime(spec_, velocities_)) {
    if (!(reference_fraction > 0.0 && reference_fraction < 1.0))
        throw ConfigError("reference_fraction must lie in (0, 1)");
    for (int i = 0; i < 2; ++i) {
        gap_[i] = spec_.slope().plus_constant(-velocity(i)).negated();
        branches_[i] = make_branches(spec_, velocity(i), i);
        maps_[i].reserve(branches_[i].size());
        for (const Branch& b : branches_[i]) {
            double ref;
            if (b.bounded_below() && b.bounded_above())
                ref = b.lo + reference_fraction_ * b.length();
            else if (b.bounded_below())
                ref = b.lo + 2.0 * reference_fraction_;
            else if (b.bounded_above())
                ref = b.hi - 2.0 * reference_fraction_;
            else
                ref = 0.0;
            maps_[i].emplace_back(gap_[i], b, ref);
        }
    }
}

int FlowSystem::branch_index(int i, double x) const {
    const auto& w = wells(i);
    // critical points separate branches; exact hits are stationary
    for (double r : w)
        if (x == r) return -1;
    std::size_t k = 0;
    while (k < w.size() && x > w[k]) ++k;
    return static_cast<int>(k);
}

const FlowMap& FlowSystem::flow_map_at(int i, double x) const {
    const int k = branch_index(i, x);
    if (k < 0) throw OutOfBranchError("position is a critical point of the driven flow");
    return maps_[i][static_cast<std::size_t>(k)];
}

double FlowSystem::pattern(int i, double t, double x) const {
    if (t < 0.0) throw ConfigError("pattern requires t >= 0");
    const int k = branch_index(i, x);
    if (k < 0) return x; // stationary solution
    const FlowMap& fm = maps_[i][static_cast<std::size_t>(k)];
    if (t == 0.0) return x;
    return fm.phi_inverse(fm.phi(x) + t, x).value;
}

double FlowSystem::reach_time(int i, double x, double y) const {
    if (x == y) return 0.0;
    const int kx = branch_index(i, x);
    if (kx < 0) return kInf; // stationary start never moves
    const int ky = branch_index(i, y);
    if (ky != kx) return kInf; // includes y at a critical point
    const FlowMap& fm = maps_[i][static_cast<std::size_t>(kx)];
    if ((y - x) * fm.branch().direction <= 0.0) return kInf; // pattern moves away
    return fm.phi(y) - fm.phi(x);
}

double FlowSystem::psi(double x) const {
    const double g0 = gap_[0](x), g1 = gap_[1](x);
    if (g0 == 0.0 || g1 == 0.0)
        throw PoleAtCriticalPointError("psi evaluated at a critical point");
    return rates_.lambda0 / g0 + rates_.lambda1 / g1;
}

double FlowSystem::log_psi(double x) const {
    return rates_.lambda0 * phi(0, x) + rates_.lambda1 * phi(1, x);
}

double FlowSystem::beta(double x, double y) const {
    return std::exp(log_psi(x) - log_psi(y));
}

Interval FlowSystem::attractor_containing(double x) const {
    const Regions& r = regime_.regions;
    for (const auto& g : {r.g_minus, r.g_plus, r.g_merged})
        if (g && g->contains(x)) return *g;
    throw WrongRegimeError("position lies in no invariant attractor");
}

FlowSystem FlowSystem::mirrored() const {
    return FlowSystem(telewell::mirrored(spec_),
                      VelocityPair(-velocities_.c1, -velocities_.c0),
                      RatePair(rates_.lambda1, rates_.lambda0), reference_fraction_);
}

void FlowSystem::dump_branches_csv(std::ostream& os) const {
    auto kind = [](EndpointKind k) {
        switch (k) {
            case EndpointKind::Attracting: return "attracting";
            case EndpointKind::Repelling: return "repelling";
            case EndpointKind::Open: return "open";
        }
        return "?";
    };
    os << "velocity_index,lo,hi,direction,lo_kind,hi_kind\n";
    for (int i = 0; i < 2; ++i)
        for (const Branch& b : branches_[i])
            os << i << ',' << b.lo << ',' << b.hi << ',' << b.direction << ',' << kind(b.lo_kind)
               << ',' << kind(b.hi_kind) << '\n';
}

void FlowSystem::dump_phi_samples_csv(std::ostream& os, int samples_per_branch) const {
    os << "velocity_index,branch,x,phi\n";
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < maps_[i].size(); ++k) {
            const Branch& b = branches_[i][k];
            const double lo = b.bounded_below() ? b.lo : (b.bounded_above() ? b.hi - 3.0 : -3.0);
            const double hi = b.bounded_above() ? b.hi : (b.bounded_below() ? b.lo + 3.0 : 3.0);
            for (int j = 1; j < samples_per_branch; ++j) {
                const double x = lo + (hi - lo) * j / samples_per_branch;
                if (!b.contains_interior(x)) continue;
                os << i << ',' << k << ',' << x << ',' << maps_[i][k].phi(x) << '\n';
            }
        }
    }
}

} // namespace telewell
