#pragma once

#include <cmath>
#include <functional>
#include <map>

#include "scherk/meshgen.hpp"
#include "scherk/periods.hpp"

namespace scherk::testing {

// Plain midpoint rule; used as an oracle against the adaptive quadrature.
inline double midpoint(const std::function<double(double)>& f, double a, double b, long n) {
    const double h = (b - a) / n;
    double s = 0;
    for (long i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

// Period-curve point at (k, y), solved once per process.
inline TowerParams solved(int k, double y = 0.1) {
    static std::map<std::pair<int, double>, double> cache;
    auto key = std::make_pair(k, y);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const PeriodCurve c = solve_period_curve(k, {y}, {-0.99, -0.01});
        it = cache.emplace(key, c.points.at(0).x).first;
    }
    return {k, y, it->second};
}

}  // namespace scherk::testing
