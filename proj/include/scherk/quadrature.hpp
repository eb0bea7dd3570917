#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature over a finite interval, templated on
// the integrand value type (double, std::complex<double>, Vec3).

#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "scherk/vec.hpp"

namespace scherk::quad {

inline double qnorm(double v) { return std::fabs(v); }
inline double qnorm(const std::complex<double>& v) { return std::abs(v); }
inline double qnorm(const Vec3& v) {
    return std::fmax(std::fabs(v.x), std::fmax(std::fabs(v.y), std::fabs(v.z)));
}

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_panels = 4000;
};

template <class V>
struct Result {
    V value{};
    double error = 0;
    int panels = 0;
    bool converged = false;
};

namespace detail {

// Kronrod abscissae; odd entries (1,3,5) and the centre are the Gauss points.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
    double a, b;
    V value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class F>
Panel<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V fc = f(c);
    V k = fc * wgk[7];
    V g = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        V s = f(c - dx) + f(c + dx);
        k += s * wgk[j];
        if (j % 2 == 1) g += s * wg[j / 2];
    }
    k *= h;
    g *= h;
    // |K - G| is pessimistic for smooth panels but never optimistic; keep it.
    return {a, b, k, qnorm(k - g)};
}

}  // namespace detail

template <class V, class F>
Result<V> integrate(F&& f, double a, double b, const Options& opt = {}) {
    if (b < a) {
        Result<V> r = integrate<V>(f, b, a, opt);
        r.value = r.value * -1.0;
        return r;
    }
    using P = detail::Panel<V>;
    std::priority_queue<P> heap;
    P first = detail::gk15<V>(f, a, b);
    V total = first.value;
    double err = first.error;
    heap.push(first);
    int panels = 1;
    auto target = [&] { return std::fmax(opt.abs_tol, opt.rel_tol * qnorm(total)); };

    while (err > target() && panels < opt.max_panels) {
        P worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {  // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        P l = detail::gk15<V>(f, worst.a, m);
        P r = detail::gk15<V>(f, m, worst.b);
        total += l.value + r.value - worst.value;
        heap.push(l);
        heap.push(r);
        ++panels;
        // Re-sum error from scratch occasionally to avoid drift in the running total.
        if (panels % 64 == 0) {
            err = 0;
            auto copy = heap;
            while (!copy.empty()) { err += copy.top().error; copy.pop(); }
        } else {
            err += l.error + r.error - worst.error;
        }
    }
    // Final exact sums.
    V sum{};
    double e = 0;
    while (!heap.empty()) {
        sum += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {sum, e, panels, e <= target()};
}

}  // namespace scherk::quad
