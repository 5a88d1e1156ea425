#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stw/reaction.hpp"

using namespace stw;

TEST_CASE("nagumo cubic: values and derivatives") {
    const auto r = nagumo(0.25);
    CHECK(r.f(0.0) == doctest::Approx(0.0));
    CHECK(r.f(0.25) == doctest::Approx(0.0));
    CHECK(r.f(1.0) == doctest::Approx(0.0));
    CHECK(r.f(0.5) == doctest::Approx(0.0625));
    CHECK(r.f1(0.0) == doctest::Approx(-0.25));
    CHECK(r.f1(1.0) == doctest::Approx(-0.75));
    CHECK(r.f2(0.0) == doctest::Approx(2.5));
    CHECK(r.f3(0.3) == doctest::Approx(-6.0));

    // finite-difference cross-check of the derivatives
    const double h = 1e-6;
    for (double v : {-0.7, 0.1, 0.45, 0.9, 1.6}) {
        CHECK(r.f1(v) == doctest::Approx((r.f(v + h) - r.f(v - h)) / (2 * h)).epsilon(1e-6));
        CHECK(r.f2(v) == doctest::Approx((r.f1(v + h) - r.f1(v - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("nagumo rejects a outside (0,1)") {
    CHECK_THROWS_AS(nagumo(0.0), std::invalid_argument);
    CHECK_THROWS_AS(nagumo(1.0), std::invalid_argument);
    CHECK_THROWS_AS(nagumo(-0.3), std::invalid_argument);
}

TEST_CASE("nagumo closed-form structural constants") {
    const double a = 0.25;
    const auto r = nagumo(a);
    CHECK(r.exact_constants);
    // sup f' attained at v = (1+a)/3
    const double vstar = (1.0 + a) / 3.0;
    CHECK(r.eta1 == doctest::Approx(r.f1(vstar)));
    CHECK(r.eta1 == doctest::Approx((a * a - a + 1.0) / 3.0));
    CHECK(r.l_lip == doctest::Approx(4.0 + a));
    CHECK(r.eta2 == doctest::Approx(2.0 - a));
    CHECK(r.eta3 == doctest::Approx(10.0));

    const auto r2 = nagumo(0.6);
    CHECK(r2.eta2 == doctest::Approx(1.6));
}

TEST_CASE("assumption checks pass for the nagumo cubic") {
    for (double a : {0.1, 0.25, 0.5}) {
        const auto report = check_assumptions(nagumo(a));
        CHECK(report.all_passed);
        CHECK_FALSE(report.constants_estimated);
        REQUIRE(report.find("A1-zeros") != nullptr);
        CHECK(report.find("A1-zeros")->passed);
        CHECK(report.find("B2")->passed);
    }

    // a > 1/2 gives a leftward wave: the nonnegative-integral condition
    // int_0^1 f = (1-2a)/12 fails, everything structural still holds
    const auto report = check_assumptions(nagumo(0.75));
    CHECK_FALSE(report.all_passed);
    CHECK_FALSE(report.find("A1-integral")->passed);
    CHECK(report.find("A1-signs")->passed);
}

TEST_CASE("assumption checks flag a broken reaction") {
    // monostable: f(v) = v(1-v) has no interior zero and the wrong signs
    ReactionFunction r;
    r.a = 0.25;
    r.f = [](double v) { return v * (1.0 - v); };
    r.f1 = [](double v) { return 1.0 - 2.0 * v; };
    r.f2 = [](double) { return -2.0; };
    r.f3 = [](double) { return 0.0; };
    r.eta1 = 1.0;
    r.l_lip = 3.0;
    r.eta2 = 2.0;
    r.eta3 = 3.0;
    const auto report = check_assumptions(r);
    CHECK_FALSE(report.all_passed);
    CHECK_FALSE(report.find("A1-zeros")->passed);
    CHECK_FALSE(report.find("A1-signs")->passed);
}

TEST_CASE("violations are reported, not thrown") {
    ReactionFunction r = nagumo(0.25);
    r.eta1 = 1e-6; // deliberately too small
    const auto report = check_assumptions(r);
    CHECK_FALSE(report.find("B1")->passed);
    CHECK_FALSE(report.all_passed);
}
