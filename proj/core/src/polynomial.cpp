#include "telewell/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace telewell {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.size() == 1 && coeffs_[0] == 0.0) coeffs_.clear();
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double Polynomial::derivative_at(double x) const {
    double p = 0.0, dp = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + *it;
    }
    return dp;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial{};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
}

double Polynomial::leading_coefficient() const {
    return coeffs_.empty() ? 0.0 : coeffs_.back();
}

Polynomial Polynomial::plus_constant(double c) const {
    std::vector<double> out = coeffs_;
    if (out.empty()) out.push_back(c);
    else out[0] += c;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::negated() const {
    std::vector<double> out = coeffs_;
    for (double& a : out) a = -a;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::deflated(double root) const {
    if (coeffs_.size() <= 1) return Polynomial{};
    std::vector<double> q(coeffs_.size() - 1);
    double carry = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
        q[k] = carry;
        carry = coeffs_[k] + carry * root;
    }
    return Polynomial(std::move(q));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<double> out(coeffs_.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        out[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(out));
}

double Polynomial::cauchy_root_bound() const {
    if (coeffs_.size() <= 1) return 1.0;
    const double lead = std::abs(coeffs_.back());
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k) m = std::max(m, std::abs(coeffs_[k]));
    return 1.0 + m / lead;
}

double divided_difference(const Polynomial& p, double a, double b) {
    if (a == b) return p.derivative_at(a);
    // (p(a) - p(b)) / (a - b) = sum_{k>=1} c_k S_k,
    // S_k = a^{k-1} + a^{k-2} b + ... + b^{k-1}, S_{k+1} = a S_k + b^k.
    const auto& c = p.coefficients();
    double acc = 0.0;
    double s = 0.0;
    double bpow = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        s = s * a + bpow; // S_k
        bpow *= b;
        acc += c[k] * s;
    }
    return acc;
}

namespace {

// Bracketed bisection seeded by the isolation interval, refined by Newton
// with the bracket as a safeguard. Assumes f(lo) and f(hi) have opposite
// signs (or one endpoint is an exact zero).
double refine_root(const Polynomial& p, double lo, double hi, double flo, double fhi) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    // bisection until the interval is small enough for Newton to be safe
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) return mid;
        const double fm = p(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo < 1e-6 * (1.0 + std::abs(mid))) break;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double f = p(x);
        const double df = p.derivative_at(x);
        double step = (df != 0.0) ? f / df : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi) || df == 0.0) xn = 0.5 * (lo + hi); // fall back to bisection
        const double fn = p(xn);
        if (fn == 0.0) return xn;
        if ((flo < 0.0) == (fn < 0.0)) {
            lo = xn;
            flo = fn;
        } else {
            hi = xn;
            fhi = fn;
        }
        if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(xn))) return xn;
        x = xn;
    }
    return x;
}

} // namespace

Polynomial::RootSet Polynomial::real_roots() const {
    RootSet out;
    const int deg = degree();
    if (deg <= 0) return out;
    if (deg == 1) {
        out.roots.push_back(-coeffs_[0] / coeffs_[1]);
        return out;
    }

    const RootSet crit = derivative().real_roots();
    const double bound = cauchy_root_bound();

    // breakpoints partition [-bound, bound] into intervals of monotonicity
    std::vector<double> pts;
    pts.push_back(-bound);
    for (double c : crit.roots)
        if (c > -bound && c < bound) pts.push_back(c);
    pts.push_back(bound);

    // scale used to decide "the polynomial is zero at a critical point"
    auto local_scale = [&](double x) {
        const double ax = std::max(1.0, std::abs(x));
        double s = 0.0, xp = 1.0;
        for (double a : coeffs_) {
            s += std::abs(a) * xp;
            xp *= ax;
        }
        return std::max(s, 1.0);
    };

    std::vector<double> fvals(pts.size());
    std::vector<bool> is_zero(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        fvals[i] = (*this)(pts[i]);
        const bool interior = (i > 0 && i + 1 < pts.size());
        if (interior && std::abs(fvals[i]) <= 1e-12 * local_scale(pts[i])) {
            is_zero[i] = true; // zero at a critical point: multiplicity > 1
            out.roots.push_back(pts[i]);
            out.has_multiple_root = true;
        }
    }

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (is_zero[i] || is_zero[i + 1]) continue; // monotone piece pinned at a zero endpoint
        const double flo = fvals[i], fhi = fvals[i + 1];
        if ((flo < 0.0) != (fhi < 0.0) && flo != 0.0 && fhi != 0.0) {
            out.roots.push_back(refine_root(*this, pts[i], pts[i + 1], flo, fhi));
        }
    }
    std::sort(out.roots.begin(), out.roots.end());
    return out;
}

} // namespace telewell
