#include "telewell/quadrature.hpp"

#include "telewell/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace telewell;

namespace {
Integrand1D plain(double a, double b, std::function<double(double)> f) {
    Integrand1D g;
    g.a = a;
    g.b = b;
    g.evaluator = [f = std::move(f)](double y, double, double) { return f(y); };
    return g;
}
} // namespace

TEST_CASE("tanh-sinh textbook integrals") {
    Integrand1D sqrt_sing;
    sqrt_sing.a = 0.0;
    sqrt_sing.b = 1.0;
    sqrt_sing.at_a = EndpointBehavior::power(-0.5);
    sqrt_sing.evaluator = [](double, double da, double) { return 1.0 / std::sqrt(da); };
    const auto q = integrate_endpoint_singular(sqrt_sing);
    CHECK(q.value == doctest::Approx(2.0).epsilon(1e-10));

    CHECK(integrate_endpoint_singular(plain(0.0, 1.0, [](double) { return 1.0; })).value ==
          doctest::Approx(1.0).epsilon(1e-12));

    // logarithmic endpoint singularity, weaker than any power
    Integrand1D log_sing;
    log_sing.a = 0.0;
    log_sing.b = 1.0;
    log_sing.evaluator = [](double, double da, double) { return -std::log(da); };
    QuadratureOptions no_validate;
    no_validate.validate_exponents = false;
    CHECK(integrate_endpoint_singular(log_sing, no_validate).value ==
          doctest::Approx(1.0).epsilon(1e-10));

    // signed orientation
    CHECK(integrate_endpoint_singular(plain(1.0, 0.0, [](double y) { return y; })).value ==
          doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("non-integrable singularities fail loudly") {
    Integrand1D f;
    f.a = 0.0;
    f.b = 1.0;
    f.at_a = EndpointBehavior::power(-1.0);
    f.evaluator = [](double, double da, double) { return 1.0 / da; };
    CHECK_THROWS_AS(integrate_endpoint_singular(f), NonConvergentError);

    // declared exponent contradicted by the integrand
    Integrand1D lie;
    lie.a = 0.0;
    lie.b = 1.0;
    lie.at_a = EndpointBehavior::power(0.5);
    lie.evaluator = [](double, double da, double) { return 1.0 / std::sqrt(da); };
    CHECK_THROWS_AS(integrate_endpoint_singular(lie), ConsistencyError);
}

TEST_CASE("gauss-kronrod adaptive") {
    const auto q = integrate_gauss_kronrod([](double x) { return std::exp(-x * x); }, 0.0, 3.0,
                                           1e-12);
    CHECK(q.value == doctest::Approx(0.886207348259558).epsilon(1e-11)); // erf form
    const auto r =
        integrate_gauss_kronrod([](double x) { return std::sin(50.0 * x); }, 0.0, 1.0, 1e-11);
    CHECK(r.value == doctest::Approx((1.0 - std::cos(50.0)) / 50.0).epsilon(1e-9));
}

TEST_CASE("triangle integrals") {
    // area of the triangle
    const auto area =
        integrate_triangle([](double, double) { return 1.0; }, 0.0, 1.0,
                           TriangleOrientation::Delta0);
    CHECK(area.value == doctest::Approx(0.5).epsilon(1e-9));

    // separable kernel z0 * z1 over Delta0(x, y):
    // int_x^y z0 (y^2 - z0^2)/2 dz0
    const double x = 0.2, y = 1.3;
    auto closed = [&] {
        auto F = [&](double z) { return y * y * z * z / 4.0 - z * z * z * z / 8.0; };
        return F(y) - F(x);
    }();
    const auto sep = integrate_triangle([](double z0, double z1) { return z0 * z1; }, x, y,
                                        TriangleOrientation::Delta0);
    CHECK(sep.value == doctest::Approx(closed).epsilon(1e-9));

    // Delta0 and Delta1 tile the square up to the diagonal
    auto k = [](double z0, double z1) { return std::exp(z0 - 0.5 * z1); };
    const auto d0 = integrate_triangle(k, x, y, TriangleOrientation::Delta0);
    const auto d1 = integrate_triangle(k, x, y, TriangleOrientation::Delta1);
    double sq = 0.0;
    {
        // iterated closed form of the square integral
        const double inner = (std::exp(y) - std::exp(x));
        const double outer = -2.0 * (std::exp(-0.5 * y) - std::exp(-0.5 * x));
        sq = inner * outer;
    }
    CHECK(d0.value + d1.value == doctest::Approx(sq).epsilon(1e-9));

    // descending orientation picks up two sign flips
    const auto desc =
        integrate_triangle([](double, double) { return 1.0; }, 1.0, 0.0,
                           TriangleOrientation::Delta0);
    CHECK(desc.value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("tolerance tightening does not degrade the result") {
    Integrand1D f;
    f.a = 0.0;
    f.b = 1.0;
    f.at_a = EndpointBehavior::power(-0.5);
    f.evaluator = [](double, double da, double) { return 1.0 / std::sqrt(da); };
    double prev_err = 1.0;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        QuadratureOptions o;
        o.tol = tol;
        const auto q = integrate_endpoint_singular(f, o);
        const double err = std::abs(q.value - 2.0);
        CHECK(err <= prev_err + 1e-15);
        prev_err = err;
    }
    CHECK(prev_err < 1e-10);
}
