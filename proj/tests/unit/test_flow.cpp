#include "telewell/flow.hpp"

#include "support/oracles.hpp"
#include "telewell/quadrature.hpp"
#include "telewell/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace telewell;

namespace {
const PotentialSpec kQuartic = PotentialSpec::reference_quartic();

FlowSystem reference_system() {
    return FlowSystem(kQuartic, VelocityPair(0.3, -0.3), RatePair(1.0, 1.0));
}
} // namespace

TEST_CASE("branch table for the reference configuration") {
    const auto branches = make_branches(kQuartic, 0.3, 0);
    REQUIRE(branches.size() == 4);
    // (b0, b+): pattern moves up, away from b0 and into b+
    const Branch& b = branches[2];
    CHECK(b.direction == 1);
    CHECK(b.lo_kind == EndpointKind::Repelling);
    CHECK(b.hi_kind == EndpointKind::Attracting);
    // (b+, inf): moves down toward b+
    CHECK(branches[3].direction == -1);
    CHECK(branches[3].lo_kind == EndpointKind::Attracting);
    CHECK(branches[3].hi_kind == EndpointKind::Open);
    // single-well case: two branches, both attracted to the root
    const auto single = make_branches(kQuartic, 0.5, 0);
    REQUIRE(single.size() == 2);
    CHECK(single[0].direction == 1);
    CHECK(single[1].direction == -1);
    CHECK_THROWS_AS(make_branches(kQuartic, 2.0 / (3.0 * std::sqrt(3.0)), 0),
                    DegenerateRootError);
}

TEST_CASE("closed-form Phi against its defining derivative") {
    const FlowSystem fs = reference_system();
    for (int i : {0, 1}) {
        for (std::size_t bi = 0; bi < fs.branches(i).size(); ++bi) {
            const FlowMap& fm = fs.flow_map(i, bi);
            const Branch& b = fm.branch();
            const double lo = b.bounded_below() ? b.lo : b.hi - 3.0;
            const double hi = b.bounded_above() ? b.hi : b.lo + 3.0;
            for (double u : {0.2, 0.5, 0.8}) {
                const double y = lo + u * (hi - lo);
                const double h = 1e-6;
                const double d = (fm.phi(y + h) - fm.phi(y - h)) / (2.0 * h);
                CHECK(d * fs.velocity_gap(i, y) == doctest::Approx(1.0).epsilon(1e-8));
            }
            CHECK(fm.phi(fm.reference_point()) == 0.0);
        }
    }
}

TEST_CASE("Phi partial fractions match the explicit c=0 form") {
    // on (0,1) with c = 0: Phi(y) = ln y - ln(1-y^2)/2 up to the reference
    FlowSystem fs(kQuartic, VelocityPair(0.0, -0.3), RatePair(1.0, 1.0));
    const FlowMap& fm = fs.flow_map_at(0, 0.5);
    auto explicit_phi = [](double y) { return std::log(y) - 0.5 * std::log(1.0 - y * y); };
    const double off = explicit_phi(fm.reference_point());
    for (double y : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        CHECK(fm.phi(y) == doctest::Approx(explicit_phi(y) - off).epsilon(1e-12));
    }
}

TEST_CASE("Phi closed form agrees with Gauss-Kronrod quadrature") {
    const FlowSystem fs = reference_system();
    const FlowMap& fm = fs.flow_map_at(0, 0.5);
    for (double y : {0.1, 0.6, 1.0}) {
        const auto q = integrate_gauss_kronrod(
            [&](double z) { return 1.0 / fs.velocity_gap(0, z); }, fm.reference_point(), y,
            1e-13);
        CHECK(fm.phi(y) == doctest::Approx(q.value).epsilon(1e-11));
    }
}

TEST_CASE("single-well Phi (log-atan branch) differentiates back") {
    FlowSystem fs(kQuartic, VelocityPair(0.5, -0.5), RatePair(1.0, 1.0));
    const FlowMap& fm = fs.flow_map_at(0, 0.0); // branch (-inf, b) of c0 - U'
    for (double y : {-2.0, -0.5, 0.4, 1.1}) {
        const double h = 1e-6;
        const double d = (fm.phi(y + h) - fm.phi(y - h)) / (2.0 * h);
        CHECK(d * fs.velocity_gap(0, y) == doctest::Approx(1.0).epsilon(1e-8));
    }
    // cross-check one value against quadrature
    const auto q = integrate_gauss_kronrod(
        [&](double z) { return 1.0 / fs.velocity_gap(0, z); }, fm.reference_point(), 1.0, 1e-13);
    CHECK(fm.phi(1.0) == doctest::Approx(q.value).epsilon(1e-11));
}

TEST_CASE("phi_inverse round trip and saturation") {
    const FlowSystem fs = reference_system();
    const FlowMap& fm = fs.flow_map_at(0, 0.5); // (b0, b+)
    const Branch& b = fm.branch();
    for (double u : {0.25, 0.5, 0.75}) {
        const double y = b.lo + u * b.length();
        const auto inv = fm.phi_inverse(fm.phi(y), fm.reference_point());
        CHECK(!inv.saturated);
        CHECK(inv.value == doctest::Approx(y).epsilon(1e-10));
    }
    const auto sat = fm.phi_inverse(1e9, fm.reference_point());
    CHECK(sat.saturated);
    CHECK(sat.value < b.hi);
    CHECK(b.hi - sat.value < 1e-9);
}

TEST_CASE("pattern semantics") {
    const FlowSystem fs = reference_system();
    CHECK(fs.pattern(0, 0.0, 0.5) == 0.5);
    // critical points are stationary
    const double ap = fs.wells(1)[2];
    CHECK(fs.pattern(1, 5.0, ap) == ap);
    // against the RK4 oracle
    for (double x : {-0.2, 0.5, 0.9}) {
        const double y = fs.pattern(0, 5.0, x);
        const double want = oracle::rk4_flow(kQuartic.slope(), 0.3, 5.0, x);
        CHECK(y == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK_THROWS_AS(fs.pattern(0, -1.0, 0.5), ConfigError);
}

TEST_CASE("pattern semigroup and Phi identity properties") {
    const FlowSystem fs = reference_system();
    SplitMix64 rng(2024);
    for (int k = 0; k < 200; ++k) {
        const int i = static_cast<int>(rng.next() % 2);
        const auto& branches = fs.branches(i);
        const Branch& b = branches[rng.next() % branches.size()];
        const double lo = b.bounded_below() ? b.lo : b.hi - 3.0;
        const double hi = b.bounded_above() ? b.hi : b.lo + 3.0;
        const double x = lo + (0.05 + 0.9 * rng.uniform()) * (hi - lo);
        const double s = 2.0 * rng.uniform();
        const double t = 2.0 * rng.uniform();
        const double one_shot = fs.pattern(i, s + t, x);
        const double two_shot = fs.pattern(i, t, fs.pattern(i, s, x));
        CHECK(std::abs(one_shot - two_shot) < 1e-9);
        const FlowMap& fm = fs.flow_map_at(i, x);
        if (one_shot > b.lo + 1e-12 && one_shot < b.hi - 1e-12)
            CHECK(std::abs(fm.phi(one_shot) - fm.phi(x) - (s + t)) < 1e-9);
        // monotone attraction toward the forward endpoint
        const double y1 = fs.pattern(i, 0.5, x);
        const double y2 = fs.pattern(i, 1.5, x);
        if (b.direction > 0) {
            CHECK(y1 >= x);
            CHECK(y2 >= y1);
            CHECK(y2 < b.hi);
        } else {
            CHECK(y1 <= x);
            CHECK(y2 <= y1);
            CHECK(y2 > b.lo);
        }
    }
}

TEST_CASE("reach_time cases") {
    const FlowSystem fs = reference_system();
    CHECK(fs.reach_time(0, 0.4, 0.4) == 0.0);
    // moving away: infinite
    CHECK(std::isinf(fs.reach_time(1, 0.2, 0.3)));
    // different branches: infinite
    const double ap = fs.wells(1)[2];
    CHECK(std::isinf(fs.reach_time(1, 0.5, 1.0)));
    // critical endpoints are never reached in finite time
    CHECK(std::isinf(fs.reach_time(1, 0.5, ap)));
    // a+ is a fixed point of flow 1 but interior to flow 0, which still moves
    CHECK(fs.reach_time(0, ap, 1.0) > 0.0);
    CHECK(std::isfinite(fs.reach_time(0, ap, 1.0)));
    const double t = fs.reach_time(0, 0.0, 0.3);
    const double want = oracle::rk4_hit_time(kQuartic.slope(), 0.3, 0.0, 0.3, 50.0);
    CHECK(t == doctest::Approx(want).epsilon(1e-8));
    // additivity along one branch
    const double t1 = fs.reach_time(0, 0.0, 0.5);
    const double t2 = fs.reach_time(0, 0.5, 0.9);
    const double t12 = fs.reach_time(0, 0.0, 0.9);
    CHECK(std::abs(t1 + t2 - t12) < 1e-9);
}

TEST_CASE("psi field and its quadrature identity") {
    const FlowSystem fs = reference_system();
    CHECK(fs.psi(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    // spec example at x = 0.2
    const double u = 0.2 * 0.2 * 0.2 - 0.2;
    const double want = 1.0 / (0.3 - u) + 1.0 / (-0.3 - u);
    CHECK(fs.psi(0.2) == doctest::Approx(want).epsilon(1e-12));
    CHECK(fs.psi(0.2) == doctest::Approx(-7.227).epsilon(1e-3));
    // psi = d/dx log Psi
    for (double x : {0.1, 0.85, 1.0}) {
        const double h = 1e-6;
        const double d = (fs.log_psi(x + h) - fs.log_psi(x - h)) / (2.0 * h);
        CHECK(d == doctest::Approx(fs.psi(x)).epsilon(1e-7));
    }
    const double b0 = fs.wells(0)[1];
    CHECK_THROWS_AS(fs.psi(b0), PoleAtCriticalPointError);
}

TEST_CASE("beta cocycle and convention invariance") {
    const FlowSystem fs = reference_system();
    const FlowSystem shifted(kQuartic, VelocityPair(0.3, -0.3), RatePair(1.0, 1.0), 0.31);
    const double x = 0.85, y = 1.0, z = 1.05;
    CHECK(fs.beta(x, x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fs.beta(x, y) * fs.beta(y, z) == doctest::Approx(fs.beta(x, z)).epsilon(1e-12));
    CHECK(shifted.beta(x, y) == doctest::Approx(fs.beta(x, y)).epsilon(1e-12));
    // inside G0 the two flows use different natural branches
    CHECK(fs.beta(-0.1, 0.1) == doctest::Approx(shifted.beta(-0.1, 0.1)).epsilon(1e-12));
}

TEST_CASE("mirrored system reflects the dynamics") {
    const PotentialSpec skew{{0.05, -1.0, 0.2, 1.0}, "skew"};
    FlowSystem fs(skew, VelocityPair(0.3, -0.2), RatePair(1.0, 2.0));
    const FlowSystem ms = fs.mirrored();
    for (double x : {-0.6, 0.1, 0.9}) {
        const double t = 0.7;
        if (fs.is_critical_point(0, x)) continue;
        const double y = fs.pattern(0, t, x);
        const double ym = ms.pattern(1, t, -x); // state roles swap
        CHECK(ym == doctest::Approx(-y).epsilon(1e-10));
    }
}
