#pragma once

#include <string>

namespace scherk {

// (k, y, x): k end pairs, branch values y in (0,1) and x in (-1,0).
struct TowerParams {
    int k = 3;
    double y = 0.5;
    double x = -0.5;

    void validate() const;

    // Exponent of the (z-y)/(1-yz) factor of g.
    double a() const { return (k - 1) / (4.0 * k); }

    std::string str() const;
};

}  // namespace scherk
