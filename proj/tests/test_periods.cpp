#include <cmath>
#include <numbers>

#include "doctest.h"
#include "scherk/errors.hpp"
#include "scherk/periods.hpp"
#include "scherk/weier.hpp"
#include "support.hpp"

using namespace scherk;
using scherk::testing::midpoint;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kTwoPi = 2 * pi;

}  // namespace

// Oracle: -2 Re phi2 along the upper bank of (y,1), from the complex evaluators,
// under t = y + s^{4k}, midpoint rule with 10^6 panels.
TEST_CASE("I1 against a midpoint oracle built on the complex evaluators") {
    const TowerParams p{3, 0.1, -0.9};
    const int n = 12;
    const double smax = std::pow(1 - p.y, 1.0 / n);
    const double oracle = midpoint(
        [&](double s) {
            const double sig = std::pow(s, n);
            const WeierstrassForms f = eval_phi(p, DomainPoint::offset(p, sig, Side::Upper));
            return -2 * f.phi2.real() * n * std::pow(s, n - 1);
        },
        0.0, smax, 1000000);
    const QuadratureResult q = integrate_I1(p, 1e-12);
    CHECK(q.value < 0);
    CHECK(std::fabs(q.value - oracle) < 1e-8);
    CHECK(q.abs_error_estimate < 1e-10);
}

TEST_CASE("I2 against a midpoint oracle on the upper semicircle") {
    const TowerParams p{3, 0.1, -0.9};
    const cplx I{0.0, 1.0};
    const double oracle = midpoint(
        [&](double t) {
            const cplx z = std::polar(1.0, t);
            const WeierstrassForms f = eval_phi(p, DomainPoint::at(p, z, Side::Upper));
            return 2 * (f.phi2 * I * z).real();
        },
        0.0, pi, 1000000);
    const QuadratureResult q = integrate_I2(p, 1e-12);
    CHECK(std::isfinite(q.value));
    CHECK(std::fabs(q.value - oracle) < 1e-8);
}

TEST_CASE("I1 quadrature refines consistently") {
    const TowerParams p{3, 0.1, -0.9};
    CHECK(std::fabs(integrate_I1(p, 1e-6).value - integrate_I1(p, 1e-10).value) < 2e-6);
    CHECK(std::fabs(integrate_I2(p, 1e-6).value - integrate_I2(p, 1e-10).value) < 2e-6);
}

TEST_CASE("I1 integrand accepts the corner values") {
    CHECK(std::isfinite(i1_integrand(3, 0.0, -1.0, 0.5)));
    CHECK(std::isfinite(i1_integrand(3, 0.0, 0.0, 0.5)));
}

TEST_CASE("closed-form k = 3 constants") {
    const auto [A, B] = closed_form_k3();
    CHECK(std::fabs(A - 0.90377) < 5e-5);
    CHECK(std::fabs(B - 0.14343) < 5e-5);
    const double qa = midpoint([](double s) { return 1 / (1 + std::pow(s, 6)); }, 0, 1, 1000000);
    const double qb = midpoint([](double s) { return std::pow(s, 4) / (1 + std::pow(s, 6)); }, 0, 1, 1000000);
    CHECK(std::fabs(A - qa) < 1e-10);
    CHECK(std::fabs(B - qb) < 1e-10);
    CHECK(A == Approx(antiderivative_k3_A(1.0) - antiderivative_k3_A(0.0)));
    // derivative of the antiderivative is the integrand
    for (double s : {0.1, 0.5, 0.9}) {
        const double h = 1e-5;
        CHECK((antiderivative_k3_A(s + h) - antiderivative_k3_A(s - h)) / (2 * h) ==
              Approx(1 / (1 + std::pow(s, 6))).epsilon(1e-8));
        CHECK((antiderivative_k3_B(s + h) - antiderivative_k3_B(s - h)) / (2 * h) ==
              Approx(std::pow(s, 4) / (1 + std::pow(s, 6))).epsilon(1e-8));
    }
}

TEST_CASE("corner (0,-1) of I1") {
    const QuadratureResult q = corner_limit_I1(3, Corner::ZeroMinusOne, 1e-12);
    CHECK(!q.divergent);
    CHECK(std::fabs(q.value - (-11.1747)) < 1e-3);
    // from the closed-form constants: 12 sqrt(2) sin(pi/3) (B - A)
    const auto [A, B] = closed_form_k3();
    CHECK(q.value == Approx(12 * std::sqrt(2.0) * std::sin(pi / 3) * (B - A)).epsilon(1e-11));
    // the interior integral tends to the corner value
    const double near = integrate_I1({3, 1e-7, -1 + 1e-7}, 1e-11).value;
    CHECK(std::fabs(near - q.value) < 1e-3);
}

TEST_CASE("corner (0,0) of I1 diverges to +inf") {
    for (int k : {3, 4, 5}) {
        const QuadratureResult q = corner_limit_I1(k, Corner::ZeroZero, 1e-10);
        CHECK(q.divergent);
        CHECK(q.divergence_sign == 1);
        CHECK(std::isinf(q.value));
    }
}

TEST_CASE("-I1 at (0,-1) increases with k") {
    double prev = corner_limit_I1(3, Corner::ZeroMinusOne, 1e-12).value;
    for (int k = 4; k <= 8; ++k) {
        const double v = corner_limit_I1(k, Corner::ZeroMinusOne, 1e-12).value;
        CHECK(-v > -prev);
        prev = v;
    }
}

TEST_CASE("corner limits of I2 lie in [-2pi, 2pi]") {
    for (int k = 3; k <= 8; ++k)
        for (Corner c : {Corner::ZeroMinusOne, Corner::ZeroZero}) {
            const QuadratureResult q = corner_limit_I2(k, c, 1e-12);
            CHECK(std::fabs(q.value) <= kTwoPi + q.abs_error_estimate);
        }
    // the interior integral tends to the corner formula
    const double near = integrate_I2({3, 1e-7, -1 + 1e-7}, 1e-11).value;
    CHECK(std::fabs(near - corner_limit_I2(3, Corner::ZeroMinusOne, 1e-12).value) < 1e-3);
    const double near0 = integrate_I2({3, 1e-7, -1e-7}, 1e-11).value;
    CHECK(std::fabs(near0 - corner_limit_I2(3, Corner::ZeroZero, 1e-12).value) < 1e-3);
}

TEST_CASE("corner limits reject k < 3") {
    CHECK_THROWS_AS(corner_limit_I1(2, Corner::ZeroMinusOne, 1e-10), InvalidParams);
    CHECK_THROWS_AS(corner_limit_I2(2, Corner::ZeroZero, 1e-10), InvalidParams);
}

TEST_CASE("residual D and its corner signs") {
    const PeriodReport a = residual({3, 0.02, -0.98}, 1e-11);
    CHECK(a.D == a.I1.value - a.I2.value);
    CHECK(a.D < -a.D_error);
    const PeriodReport b = residual({3, 0.02, -0.02}, 1e-11);
    CHECK(b.D > b.D_error);
}

TEST_CASE("period curve solve") {
    SUBCASE("k = 3 default grid") {
        const PeriodCurve c = solve_period_curve(3, default_y_grid(), {-0.99, -0.01});
        REQUIRE(!c.points.empty());
        for (const auto& pt : c.points) {
            CHECK(std::fabs(pt.residual) < 1e-8);
            CHECK(std::fabs(residual({3, pt.y, pt.x}, 1e-11).D) < 1e-8);
        }
        const std::string csv = period_curve_csv(c);
        CHECK(csv.rfind("k,y,x,residual,bracket_width\n", 0) == 0);
    }
    SUBCASE("k = 4") {
        const PeriodCurve c = solve_period_curve(4, {0.05, 0.1}, {-0.99, -0.01});
        CHECK(!c.points.empty());
    }
    SUBCASE("window without a sign change") {
        const PeriodCurve c = solve_period_curve(3, {0.1}, {-0.99, -0.9});
        CHECK(c.points.empty());
        REQUIRE(c.diagnostics.size() == 1);
        CHECK(c.diagnostics[0].kind == "NoBracket");
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(solve_period_curve(2, {0.1}, {-0.99, -0.01}), InvalidParams);
        CHECK_THROWS_AS(solve_period_curve(3, {0.1}, {-0.5, -0.6}), InvalidParams);
    }
}
