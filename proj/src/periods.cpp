#include "scherk/periods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "scherk/errors.hpp"
#include "scherk/quadrature.hpp"
#include "scherk/weier.hpp"

namespace scherk {

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureResult from_quad(const quad::Result<double>& r) {
    QuadratureResult q;
    q.value = r.value;
    q.abs_error_estimate = r.error;
    q.panels_used = r.panels;
    return q;
}

void require(const quad::Result<double>& r, double tol, const char* what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": error estimate " << r.error << " above tolerance " << tol << " after "
           << r.panels << " panels";
        throw ToleranceNotMet(os.str(), r.error);
    }
}

}  // namespace

double i1_integrand(int k, double y, double x, double s) {
    const int n = 4 * k;
    const double a = (k - 1) / (4.0 * k);
    const double sig = std::pow(s, n);
    const double P = 1.0 - y * y - y * sig;   // 1 - y t with t = y + sig, divided through
    const double t = y + sig;
    const double B = (1.0 - x * t) / (t - x);
    const double den = std::sqrt(std::pow(s, 2 * k) * std::sqrt(P) + 0.5 * (1.0 + t) * (1.0 - y)) *
                       std::pow(P, 0.75);
    const double br = -std::pow(P, a) / std::sqrt(B) +
                      std::pow(s, 2 * (k - 1)) * std::pow(P, -a) * std::sqrt(B);
    return std::sin(kPi / k) * br * n / den;
}

double i2_integrand(const TowerParams& p, double t) {
    const cplx z = std::polar(1.0, t);
    const DomainPoint pt = DomainPoint::offset(p, z - p.y, Side::Upper);
    const cplx g = eval_g(p, pt);
    const cplx dh = eval_dh_dz(p, pt);
    const cplx I{0.0, 1.0};
    return ((I / g + I * g) * dh * (I * z)).real();
}

QuadratureResult integrate_I1(const TowerParams& p, double tol, int max_panels) {
    p.validate();
    const double smax = std::pow(1.0 - p.y, 1.0 / (4.0 * p.k));
    quad::Options o;
    o.abs_tol = tol;
    o.max_panels = max_panels;
    auto r = quad::integrate<double>([&](double s) { return i1_integrand(p.k, p.y, p.x, s); }, 0.0, smax, o);
    require(r, tol, "I1");
    return from_quad(r);
}

QuadratureResult integrate_I2(const TowerParams& p, double tol, int max_panels) {
    p.validate();
    quad::Options o;
    o.abs_tol = tol;
    o.max_panels = max_panels;
    auto r = quad::integrate<double>([&](double t) { return i2_integrand(p, t); }, 0.0, kPi, o);
    require(r, tol, "I2");
    return from_quad(r);
}

QuadratureResult corner_limit_I1(int k, Corner corner, double tol) {
    if (k < 3) throw InvalidParams("corner limits need k >= 3");
    quad::Options o;
    o.abs_tol = 0.25 * tol;
    const double pre = 4.0 * k * std::sqrt(2.0) * std::sin(kPi / k);

    if (corner == Corner::ZeroMinusOne) {
        auto A = quad::integrate<double>([&](double s) { return 1.0 / (1.0 + std::pow(s, 2 * k)); }, 0.0, 1.0, o);
        auto B = quad::integrate<double>(
            [&](double s) { return std::pow(s, 2 * k - 2) / (1.0 + std::pow(s, 2 * k)); }, 0.0, 1.0, o);
        require(A, o.abs_tol, "corner A");
        require(B, o.abs_tol, "corner B");
        QuadratureResult q;
        q.value = pre * (B.value - A.value);
        q.abs_error_estimate = pre * (A.error + B.error);
        q.panels_used = A.panels + B.panels;
        return q;
    }

    // (0,0): the integrand behaves like s^{-2} at the origin. Integrate on
    // [eps, 1] and test whether the cutoff values grow like 1/eps.
    QuadratureResult q;
    std::vector<double> J;
    for (int e = 2; e <= 8; ++e) {
        const double eps = std::pow(10.0, -e);
        auto r = quad::integrate<double>([&](double s) { return i1_integrand(k, 0.0, 0.0, s); }, eps, 1.0, o);
        J.push_back(r.value);
        q.panels_used += r.panels;
    }
    bool grows = true;
    for (size_t i = J.size() - 3; i + 1 < J.size(); ++i) {
        const double ratio = J[i + 1] / J[i];
        if (!(ratio > 5.0 && ratio < 20.0)) grows = false;
    }
    q.divergent = grows;
    if (grows) {
        q.divergence_sign = J.back() > 0 ? 1 : -1;
        q.value = q.divergence_sign * HUGE_VAL;
        q.abs_error_estimate = 0.0;
    } else {
        q.value = J.back();
        q.abs_error_estimate = std::fabs(J.back() - J[J.size() - 2]);
    }
    return q;
}

QuadratureResult corner_limit_I2(int k, Corner corner, double tol) {
    if (k < 3) throw InvalidParams("corner limits need k >= 3");
    const double sgn = corner == Corner::ZeroMinusOne ? 1.0 : -1.0;
    const double c = corner == Corner::ZeroMinusOne ? k - 1.0 : k + 1.0;
    quad::Options o;
    o.abs_tol = tol;
    auto r = quad::integrate<double>(
        [&](double t) {
            return -2.0 * std::cos((4.0 * kPi + sgn * t * c) / (4.0 * k)) / std::sqrt(1.0 + std::cos(0.5 * t));
        },
        0.0, kPi, o);
    require(r, tol, "corner I2");
    if (std::fabs(r.value) > 2 * kPi + r.error) {
        std::ostringstream os;
        os << "corner I2 = " << r.value << " outside [-2pi, 2pi]";
        throw BoundViolation(os.str());
    }
    return from_quad(r);
}

double antiderivative_k3_A(double s) {
    const double r3 = std::sqrt(3.0);
    return (-r3 * std::log(s * s - r3 * s + 1) + r3 * std::log(s * s + r3 * s + 1) - 2 * std::atan(r3 - 2 * s) +
            4 * std::atan(s) + 2 * std::atan(2 * s + r3)) / 12.0;
}

double antiderivative_k3_B(double s) {
    const double r3 = std::sqrt(3.0);
    return (r3 * std::log(s * s - r3 * s + 1) - r3 * std::log(s * s + r3 * s + 1) - 2 * std::atan(r3 - 2 * s) +
            4 * std::atan(s) + 2 * std::atan(2 * s + r3)) / 12.0;
}

std::pair<double, double> closed_form_k3() {
    return {antiderivative_k3_A(1.0) - antiderivative_k3_A(0.0),
            antiderivative_k3_B(1.0) - antiderivative_k3_B(0.0)};
}

PeriodReport residual(const TowerParams& p, double tol) {
    PeriodReport r;
    r.params = p;
    r.I1 = integrate_I1(p, tol);
    r.I2 = integrate_I2(p, tol);
    r.D = r.I1.value - r.I2.value;
    r.D_error = r.I1.abs_error_estimate + r.I2.abs_error_estimate;
    return r;
}

std::vector<double> default_y_grid() { return {0.05, 0.10, 0.15, 0.20, 0.25, 0.30}; }

namespace {

struct Bracket {
    double a, b, fa, fb;
};

bool find_bracket(const std::function<double(double)>& D, double lo, double hi, int n, Bracket& out) {
    double xa = lo, fa = D(lo);
    for (int i = 1; i < n; ++i) {
        const double xb = lo + (hi - lo) * i / (n - 1);
        const double fb = D(xb);
        if (fa == 0.0 || (fa < 0) != (fb < 0)) {
            out = {xa, xb, fa, fb};
            return true;
        }
        xa = xb;
        fa = fb;
    }
    return false;
}

}  // namespace

PeriodCurve solve_period_curve(int k, const std::vector<double>& y_grid, std::pair<double, double> x_window,
                               const SolveOptions& opt) {
    if (k < 3) throw InvalidParams("k must be >= 3");
    auto [lo, hi] = x_window;
    if (!(lo > -1.0 && hi < 0.0 && lo < hi)) throw InvalidParams("x window must lie inside (-1, 0)");
    std::vector<double> ys = y_grid;
    std::sort(ys.begin(), ys.end());

    PeriodCurve curve;
    curve.k = k;
    curve.x_window = x_window;
    bool have_prev = false;
    double prev = 0.0;

    for (double y : ys) {
        if (!(y > 0.0 && y < 1.0)) throw InvalidParams("y grid values must lie in (0,1)");
        TowerParams p{k, y, lo};
        std::function<double(double)> D = [&](double x) {
            p.x = x;
            return residual(p, opt.quad_tol).D;
        };

        Bracket br{};
        bool found = false;
        if (have_prev) {
            // Warm start: grow a window around the previous root.
            double d = 0.02 * (hi - lo);
            while (!found && d < (hi - lo)) {
                const double a = std::max(lo, prev - d), b = std::min(hi, prev + d);
                found = find_bracket(D, a, b, 3, br);
                d *= 2.0;
            }
        }
        if (!found) found = find_bracket(D, lo, hi, opt.scan_points, br);
        if (!found) {
            std::ostringstream os;
            os.precision(6);
            os << "no sign change of D for x in [" << lo << ", " << hi << "] at y = " << y;
            curve.diagnostics.push_back({y, "NoBracket", os.str()});
            continue;
        }

        double a = br.a, b = br.b, fa = br.fa;
        double m = 0.5 * (a + b), fm = br.fa == 0.0 ? 0.0 : D(m);
        if (br.fa == 0.0) m = br.a;
        int it = 0;
        while (std::fabs(fm) >= opt.tol && it++ < opt.max_bisections) {
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            const double nm = 0.5 * (a + b);
            if (nm == a || nm == b) break;
            m = nm;
            fm = D(m);
        }
        if (std::fabs(fm) >= opt.tol) {
            std::ostringstream os;
            os << "bisection stalled at y = " << y << " with |D| = " << std::fabs(fm);
            throw ToleranceNotMet(os.str(), std::fabs(fm));
        }
        curve.points.push_back({y, m, fm, b - a});
        prev = m;
        have_prev = true;
    }
    return curve;
}

std::string period_curve_csv(const PeriodCurve& curve) {
    std::string out = "k,y,x,residual,bracket_width\n";
    char buf[160];
    for (const auto& pt : curve.points) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", curve.k, pt.y, pt.x, pt.residual,
                      pt.bracket_width);
        out += buf;
    }
    return out;
}

}  // namespace scherk
