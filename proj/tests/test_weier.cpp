#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "scherk/errors.hpp"
#include "scherk/periods.hpp"
#include "scherk/weier.hpp"

using namespace scherk;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

DomainPoint at(const TowerParams& p, cplx z, Side s = Side::Auto) { return DomainPoint::at(p, z, s); }

}  // namespace

TEST_CASE("params validation") {
    CHECK_NOTHROW(TowerParams{3, 0.5, -0.5}.validate());
    CHECK_THROWS_AS(TowerParams({2, 0.5, -0.5}).validate(), InvalidParams);
    CHECK_THROWS_AS(TowerParams({3, 1.0, -0.5}).validate(), InvalidParams);
    CHECK_THROWS_AS(TowerParams({3, 0.5, 0.0}).validate(), InvalidParams);
    CHECK(TowerParams{3, 0.5, -0.5}.a() == Approx(2.0 / 12));
}

TEST_CASE("g at the end point is exp(i pi (1+k)/k)") {
    for (int k : {3, 4, 6}) {
        const TowerParams p{k, 0.3, -0.4};
        const cplx g = eval_g(p, at(p, std::polar(1.0, 1e-9)));
        CHECK(std::abs(g - std::polar(1.0, pi * (1 + k) / k)) < 1e-7);
    }
}

TEST_CASE("g vanishes at y and has modulus one on the circle") {
    const TowerParams p{3, 0.5, -0.5};
    CHECK(std::abs(eval_g(p, at(p, 0.5))) == 0.0);
    CHECK(std::abs(std::abs(eval_g(p, at(p, std::polar(1.0, pi / 4)))) - 1.0) < 1e-12);
}

TEST_CASE("g on the anchor segment matches the stretch formula") {
    const TowerParams p{3, 0.25, -0.5};
    // -e^{i pi/3} ((t-y)/(1-yt))^{2/12} ((1-xt)/(t-x))^{1/2} at t = 0.5
    const cplx expect = -std::polar(1.0, pi / 3) * std::pow(0.25 / 0.875, 2.0 / 12) * std::sqrt(1.25 / 1.0);
    const cplx g = eval_g(p, at(p, 0.5, Side::Upper));
    CHECK(std::abs(g - expect) < 1e-14);
}

TEST_CASE("g^{4k} satisfies the algebraic relation with c = 1") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(0.05, 0.95), th(0.0, 2 * pi);
    for (int k : {3, 4, 5}) {
        const TowerParams p{k, 0.35, -0.6};
        for (int i = 0; i < 50; ++i) {
            const cplx z = std::polar(r(rng), th(rng));
            const cplx g = eval_g(p, at(p, z));
            const cplx lhs = std::pow(g, 4 * k);
            const cplx rhs = std::pow(-1.0, k - 1) * std::pow((p.y - z) / (1.0 - p.y * z), k - 1) *
                             std::pow((1.0 - p.x * z) / (p.x - z), 2 * k);
            CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(rhs));
            CHECK(std::abs(g_power_rhs(p, z) - rhs) <= 1e-13 * std::abs(rhs));
        }
    }
}

TEST_CASE("w on the anchor segment and at the origin") {
    const TowerParams p{3, 0.5, -0.5};
    CHECK(std::abs(eval_w(p, at(p, 0.5))) == 0.0);
    // -2 sqrt(0.625 * 0.25) / (1.75 * 1.5)
    const double w75 = -2 * std::sqrt(0.625 * 0.25) / (1.75 * 1.5);
    CHECK(w75 == Approx(-0.301170).epsilon(1e-6));
    const cplx w = eval_w(p, at(p, 0.75, Side::Upper));
    CHECK(std::abs(w - cplx(0.0, w75)) < 1e-15);
    const cplx w0 = eval_w(p, at(p, 0.0));
    CHECK(std::abs(w0 * w0 - 8.0 / 9.0) < 1e-14);
    CHECK(std::abs(eval_w_inv(p, at(p, -1.0))) < 1e-15);
}

TEST_CASE("F is real positive on the anchor segment") {
    const TowerParams p{3, 0.5, -0.5};
    const double t = 0.75, y = 0.5;
    const double expect = std::sqrt(1 + ((1 + t) * (1 - y) / 2) / std::sqrt((1 - y * t) * (t - y)));
    CHECK(expect == Approx(std::sqrt(1 + 0.4375 / 0.395284)).epsilon(1e-6));
    const cplx F = eval_F(p, at(p, t, Side::Upper));
    CHECK(std::abs(F - expect) < 1e-14);
}

TEST_CASE("F^2 at z = -1 and at the branch point x") {
    const TowerParams p{3, 0.5, -0.5};
    const cplx F = eval_F(p, at(p, std::polar(1.0, pi - 1e-9)));
    CHECK(std::abs(F * F - 1.0) < 1e-8);
    const double v1 = std::sqrt(9.0 - 1.0 / 9.0);
    const cplx v2 = 1.0 - (I / v1) * (1.0 / 3.0);
    const cplx Fx = eval_F(p, at(p, -0.5, Side::Upper));
    CHECK(std::abs(Fx * Fx - v2) < 1e-14);
}

TEST_CASE("dh on the anchor segment") {
    const TowerParams p{3, 0.5, -0.5};
    const double t = 0.75, y = 0.5, q = (1 - y * t) * (t - y);
    const double mag = 1 / (std::sqrt(std::sqrt(q) + (1 + t) * (1 - y) / 2) * std::pow(q, 0.75));
    const cplx dh = eval_dh_dz(p, at(p, t, Side::Upper));
    // 1/(F (1-yz)(y-z)) is negative for y < t; the stretch integrand is its modulus.
    CHECK(std::abs(dh.imag()) < 1e-14 * mag);
    CHECK(dh.real() == Approx(-mag).epsilon(1e-14));
}

TEST_CASE("dh directions: circle imaginary, slit genuinely complex") {
    const TowerParams p{3, 0.5, -0.5};
    const cplx z = std::polar(1.0, pi / 2);
    const cplx v = eval_dh_dz(p, at(p, z)) * (I * z);
    CHECK(std::fabs(v.real()) < 1e-10 * std::abs(v));
    const cplx u = eval_dh_dz(p, at(p, -0.75, Side::Upper));
    CHECK(std::fabs(u.real()) > 1e-6 * std::abs(u));
    CHECK(std::fabs(u.imag()) > 1e-6 * std::abs(u));
}

TEST_CASE("null curve identity and phi3 = dh") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(0.05, 0.95), th(0.0, 2 * pi);
    const TowerParams p{4, 0.2, -0.3};
    for (int i = 0; i < 100; ++i) {
        const WeierstrassForms f = eval_phi(p, at(p, std::polar(r(rng), th(rng))));
        const double m = std::max({std::norm(f.phi1), std::norm(f.phi2), std::norm(f.phi3)});
        CHECK(std::abs(f.phi1 * f.phi1 + f.phi2 * f.phi2 + f.phi3 * f.phi3) <= 1e-13 * m);
        CHECK(f.phi3 == f.dh_dz);
    }
}

TEST_CASE("phi2 on the anchor segment equals the stretch integrand of I1") {
    const TowerParams p{3, 0.5, -0.5};
    const double t = 0.75;
    const int n = 12;
    const double s = std::pow(t - p.y, 1.0 / n);
    const WeierstrassForms f = eval_phi(p, at(p, t, Side::Upper));
    // I1 = -2 Re int phi2 dt, written in s with t = y + s^n.
    CHECK(-2 * f.phi2.real() == Approx(i1_integrand(3, p.y, p.x, s) / (n * std::pow(s, n - 1))).epsilon(1e-13));
}

TEST_CASE("stretch 5: third coordinate constant on the straight-line sheet") {
    const TowerParams p{3, 0.5, -0.5};
    // lower bank of the cut (y,1)
    for (double t : {0.6, 0.75, 0.9}) {
        const WeierstrassForms f = eval_phi(p, at(p, cplx(t, 0.0), Side::Lower));
        CHECK(std::fabs(f.phi3.real()) < 1e-12 * std::abs(f.phi3));
    }
}

TEST_CASE("branch continuation") {
    const TowerParams p{3, 0.5, -0.5};
    const DomainPoint a = DomainPoint::at(p, anchor_point(p), Side::Upper);
    CHECK(anchor_point(p) == cplx(0.75, 0.0));

    SUBCASE("constant path") {
        const std::vector<cplx> path{a.z, a.z, a.z};
        const BranchState s = continue_branch(p, path, a.branch);
        CHECK(s.argA == a.branch.argA);
        CHECK(s.argB == a.branch.argB);
        CHECK(s.argW == a.branch.argW);
        CHECK(s.sheet == a.branch.sheet);
    }
    SUBCASE("retraced path") {
        std::vector<cplx> path;
        for (int i = 0; i <= 20; ++i) path.push_back(cplx(0.75 + 0.2 * i / 20.0, 0.0));
        for (int i = 20; i >= 0; --i) path.push_back(cplx(0.75 + 0.2 * i / 20.0, 0.0));
        const BranchState s = continue_branch(p, path, a.branch);
        CHECK(s.argA == Approx(a.branch.argA));
        CHECK(s.argB == Approx(a.branch.argB));
        CHECK(s.sheet == a.branch.sheet);
    }
    SUBCASE("loop around x flips the square root of the x factor") {
        const cplx c = p.x;
        const double r = 0.1;
        std::vector<cplx> path;
        const int n = 400;
        for (int i = 0; i <= n; ++i) path.push_back(c + std::polar(r, 2 * pi * i / n));
        const DomainPoint start = DomainPoint::at(p, path.front());
        const BranchState s = continue_branch(p, path, start.branch);
        // winding of (1-xz)/(z-x) about 0 by summing principal argument increments
        double wind = 0;
        auto B = [&](cplx z) { return (1.0 - p.x * z) / (z - p.x); };
        for (int i = 0; i < n; ++i) wind += std::arg(B(path[i + 1]) / B(path[i]));
        CHECK(wind == Approx(-2 * pi).epsilon(1e-12));
        CHECK(s.argB - start.branch.argB == Approx(wind).epsilon(1e-12));
        const DomainPoint end = DomainPoint::with_branch(p, path.back() - p.y, s);
        CHECK(std::abs(eval_g(p, end) + eval_g(p, start)) < 1e-13);
    }
    SUBCASE("step and clearance limits") {
        ContinuationOptions o;
        const std::vector<cplx> through{cplx(-0.5, 0.1), cplx(-0.5, 0.0), cplx(-0.5, -0.1)};
        CHECK_THROWS_AS(continue_branch(p, through, DomainPoint::at(p, through[0]).branch, o), SingularityClearance);
        const std::vector<cplx> coarse{cplx(-0.45, 0.0), cplx(-0.55, 1e-3)};
        CHECK_THROWS_AS(continue_branch(p, coarse, DomainPoint::at(p, coarse[0]).branch, o), StepTooLarge);
    }
}

TEST_CASE("tracked and canonical branch states agree away from the cuts") {
    const TowerParams p{3, 0.1, -0.157};
    const DomainPoint a = DomainPoint::at(p, anchor_point(p), Side::Upper);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r(0.05, 0.98), th(0.05, 2 * pi - 0.05);
    for (int i = 0; i < 200; ++i) {
        const cplx dy = std::polar(r(rng), th(rng)) * 0.85;
        const cplx z = p.y + dy;
        if (std::abs(z) >= 0.999 || std::abs(z - p.x) < 0.02) continue;
        // straight from the anchor when above the axis; below it, cross between x and y
        BranchState t = a.branch;
        cplx from = a.dy;
        if (z.imag() < 0) {
            const cplx m = 0.5 * (p.x + p.y) - p.y;
            for (cplx via : {m + cplx(0, 0.3), m - cplx(0, 0.3)}) {
                t = track_branch(p, from, t, via);
                from = via;
            }
        }
        t = track_branch(p, from, t, dy);
        const cplx gt = eval_g(p, DomainPoint::with_branch(p, dy, t));
        const cplx gc = eval_g(p, DomainPoint::offset(p, dy));
        const cplx Ft = eval_F(p, DomainPoint::with_branch(p, dy, t));
        const cplx Fc = eval_F(p, DomainPoint::offset(p, dy));
        CHECK(std::abs(gt - gc) < 1e-12 * (1 + std::abs(gc)));
        CHECK(std::abs(Ft - Fc) < 1e-12 * (1 + std::abs(Fc)));
    }
}

TEST_CASE("involution images") {
    const TowerParams p{3, 0.5, -0.5};
    const DomainPoint c = DomainPoint::at(p, std::polar(1.0, pi / 3));
    const InvolutionImage r1 = involution_image(c, Involution::Row1, 3);
    CHECK(std::abs(r1.z_image - std::polar(1.0, pi / 3)) < 1e-15);
    CHECK(r1.g_transform == "1/conj(g)");
    CHECK(std::abs(r1.apply(cplx(2.0, 1.0), 3) - 1.0 / cplx(2.0, -1.0)) < 1e-15);

    const InvolutionImage r2 = involution_image(DomainPoint::at(p, -0.5 + 1e-3, Side::Upper), Involution::Row2, 3);
    CHECK(r2.z_image.real() == Approx(-0.5 + 1e-3));
    CHECK(r2.g_transform == "conj(g)");

    const DomainPoint s6 = DomainPoint::at(p, 0.7, Side::Upper);
    const InvolutionImage r6 = involution_image(s6, Involution::Row6, 3);
    CHECK(r6.z_image == cplx(0.7, 0.0));
    const cplx g = eval_g(p, s6);
    CHECK(std::abs(r6.apply(g, 3) - std::polar(1.0, 2 * pi / 3) * std::conj(g)) < 1e-15);
    CHECK(std::abs(r6.apply(g, 3) - g) < 1e-10);
}

TEST_CASE("evaluator errors") {
    const TowerParams p{3, 0.5, -0.5};
    CHECK_THROWS_AS(eval_w(p, at(p, -1.0)), PoleHit);
    CHECK_THROWS_AS(eval_dh_dz(p, at(p, 0.5)), BranchPointHit);
}
