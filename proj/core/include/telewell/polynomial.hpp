#pragma once

#include <vector>

namespace telewell {

/// Real polynomial, coefficients in ascending degree order.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);

    double operator()(double x) const;
    double derivative_at(double x) const;
    Polynomial derivative() const;

    /// Degree after trimming trailing (near-)zero coefficients; -1 for the
    /// zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double leading_coefficient() const;

    Polynomial plus_constant(double c) const;
    Polynomial negated() const;
    /// p(x) / (x - root) by synthetic division (remainder dropped).
    Polynomial deflated(double root) const;
    /// Antiderivative with value 0 at x = 0.
    Polynomial antiderivative() const;

    struct RootSet {
        std::vector<double> roots;      // ascending, simple roots only
        bool has_multiple_root = false; // a root of even/odd multiplicity > 1 was met
    };

    /// All real roots, isolated by recursion on derivative critical points
    /// and refined by bracketed bisection + Newton.
    RootSet real_roots() const;

    /// 1 + max |a_i / a_n|; all real roots lie in [-bound, bound].
    double cauchy_root_bound() const;

private:
    std::vector<double> coeffs_;
};

/// (p(a) - p(b)) / (a - b), evaluated without cancellation via the division
/// identity; exact limit p'(a) when a == b.
double divided_difference(const Polynomial& p, double a, double b);

} // namespace telewell
