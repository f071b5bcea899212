#include "telewell/potential.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace telewell;

namespace {
const PotentialSpec kQuartic = PotentialSpec::reference_quartic();
// roots of x^3 - x = +-0.3, frozen from a high-precision bisection run
const double kB0 = -0.338936241594999;  // middle root at c = +0.3
const double kBm = -0.786482541161627;
const double kBp = 1.125418782756626;
} // namespace

TEST_CASE("reference quartic landscape") {
    const Landscape land = validate_double_well(kQuartic);
    CHECK(land.x_minus == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(land.x_zero == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(land.x_plus == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(land.V == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-14));
    CHECK(land.v == doctest::Approx(-land.V).epsilon(1e-14));
    REQUIRE(land.inflection_points.size() == 2);
    CHECK(land.inflection_points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("rejects non double wells") {
    CHECK_THROWS_AS(validate_double_well({{0, 0, 0, 1}, "cubic slope x^3"}),
                    NotDoubleWellError);
    // five real roots
    CHECK_THROWS_AS(validate_double_well({{0, 0.5, 0, -2, 0, 1}, "quintic"}), NotDoubleWellError);
    CHECK_THROWS_AS(validate_double_well({{}, "empty"}), NotDoubleWellError);
    CHECK_THROWS_AS(validate_double_well({{0, -1, 0, -1}, "negative lead"}), NotDoubleWellError);
    CHECK_THROWS_AS(validate_double_well({{0, -1, 1}, "even degree"}), NotDoubleWellError);
}

TEST_CASE("critical points against the scan oracle") {
    const auto roots = critical_points(kQuartic, 0.3);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(kBm).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(kB0).epsilon(1e-12));
    CHECK(roots[2] == doctest::Approx(kBp).epsilon(1e-12));

    const auto expected = oracle::scan_roots(kQuartic.slope().plus_constant(-0.3), 3.0);
    REQUIRE(expected.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(roots[k] - expected[k]) < 1e-12);

    const auto single = critical_points(kQuartic, 0.5);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == doctest::Approx(1.191487883953119).epsilon(1e-12));

    // residual and curvature sign alternation across three roots
    const Polynomial upp = kQuartic.curvature();
    for (double r : roots) CHECK(std::abs(kQuartic.slope()(r) - 0.3) < 1e-10);
    CHECK(upp(roots[0]) > 0.0);
    CHECK(upp(roots[1]) < 0.0);
    CHECK(upp(roots[2]) > 0.0);

    CHECK_THROWS_AS(critical_points(kQuartic, 2.0 / (3.0 * std::sqrt(3.0))),
                    DegenerateRootError);
}

TEST_CASE("regime classification across the case diagram") {
    const Regime a = classify_regime(kQuartic, VelocityPair(0.3, -0.3));
    CHECK(a.tag == RegimeTag::CaseA);
    CHECK(a.regions.g_zero->lo == doctest::Approx(kB0).epsilon(1e-12));
    CHECK(a.regions.g_zero->hi == doctest::Approx(-kB0).epsilon(1e-12));
    CHECK(a.regions.g_plus->lo == doctest::Approx(-kBm).epsilon(1e-12));
    CHECK(a.regions.g_plus->hi == doctest::Approx(kBp).epsilon(1e-12));
    CHECK(a.regions.g_minus->lo == doctest::Approx(-kBp).epsilon(1e-12));
    CHECK(!a.regions.g_merged);

    const Regime bu = classify_regime(kQuartic, VelocityPair(0.5, -0.3));
    CHECK(bu.tag == RegimeTag::CaseBUpper);
    CHECK(bu.regions.g_plus.has_value());
    CHECK(!bu.regions.g_minus);
    CHECK(!bu.regions.g_zero);
    CHECK(bu.regions.g_plus->hi == doctest::Approx(1.191487883953119).epsilon(1e-12));

    const Regime bl = classify_regime(kQuartic, VelocityPair(0.3, -0.5));
    CHECK(bl.tag == RegimeTag::CaseBLower);
    CHECK(bl.regions.g_minus.has_value());
    CHECK(!bl.regions.g_plus);

    const Regime c = classify_regime(kQuartic, VelocityPair(0.5, -0.5));
    CHECK(c.tag == RegimeTag::CaseC);
    CHECK(c.regions.g_merged->lo == doctest::Approx(-1.191487883953119).epsilon(1e-12));
    CHECK(c.regions.g_merged->hi == doctest::Approx(1.191487883953119).epsilon(1e-12));

    CHECK(classify_regime(kQuartic, VelocityPair(0.6, 0.5)).tag == RegimeTag::SingleWellHigh);
    CHECK(classify_regime(kQuartic, VelocityPair(-0.5, -0.6)).tag == RegimeTag::SingleWellLow);

    CHECK_THROWS_AS(classify_regime(kQuartic, VelocityPair(0.3849001794597505, -0.3)),
                    DegenerateError);
    CHECK_THROWS_AS(VelocityPair(0.3, 0.3), ConfigError);
}

TEST_CASE("case A ordering invariant") {
    for (double c0 : {0.05, 0.15, 0.25, 0.35}) {
        for (double c1 : {-0.37, -0.2, -0.01}) {
            if (c0 <= c1) continue;
            const Regime r = classify_regime(kQuartic, VelocityPair(c0, c1));
            REQUIRE(r.tag == RegimeTag::CaseA);
            const auto& w0 = r.wells0;
            const auto& w1 = r.wells1;
            CHECK(w1[0] < w0[0]);
            CHECK(w0[0] < w0[1]);
            CHECK(w0[1] < w1[1]);
            CHECK(w1[1] < w1[2]);
            CHECK(w1[2] < w0[2]);
        }
    }
}

TEST_CASE("classification is antisymmetric under reflection") {
    // asymmetric slope so the mirror is a genuinely different potential
    const PotentialSpec skew{{0.05, -1.0, 0.2, 1.0}, "skew"};
    const PotentialSpec skew_m = mirrored(skew);
    for (auto [c0, c1] : {std::pair{0.5, -0.2}, {0.25, -0.45}, {0.2, -0.2}}) {
        Regime r;
        try {
            r = classify_regime(skew, VelocityPair(c0, c1));
        } catch (const DegenerateError&) {
            continue;
        }
        const Regime m = classify_regime(skew_m, VelocityPair(-c1, -c0));
        RegimeTag want = r.tag;
        if (r.tag == RegimeTag::CaseBUpper) want = RegimeTag::CaseBLower;
        else if (r.tag == RegimeTag::CaseBLower) want = RegimeTag::CaseBUpper;
        CHECK(m.tag == want);
        // mirrored wells: wells0 <-> -reverse(wells1)
        REQUIRE(m.wells0.size() == r.wells1.size());
        for (std::size_t k = 0; k < m.wells0.size(); ++k)
            CHECK(m.wells0[k] ==
                  doctest::Approx(-r.wells1[r.wells1.size() - 1 - k]).epsilon(1e-10));
    }
}

TEST_CASE("potential reconstruction for reporting") {
    CHECK(kQuartic.potential(0.0) == 0.0);
    CHECK(kQuartic.potential(1.0) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(kQuartic.potential(2.0) == doctest::Approx(2.0).epsilon(1e-14));
}
