#pragma once

// Period integrals I1 (along the stretch y < z < 1) and I2 (along the upper
// unit semicircle), their corner limits, and the period-curve solver.

#include <string>
#include <utility>
#include <vector>

#include "scherk/params.hpp"

namespace scherk {

struct QuadratureResult {
    double value = 0;
    double abs_error_estimate = 0;
    int panels_used = 0;
    bool divergent = false;
    int divergence_sign = 0;  // +1 / -1 when divergent
};

struct PeriodReport {
    TowerParams params;
    QuadratureResult I1;
    QuadratureResult I2;
    double D = 0;           // I1 - I2, see residual()
    double D_error = 0;     // combined quadrature error estimate
};

struct PeriodCurvePoint {
    double y = 0, x = 0, residual = 0, bracket_width = 0;
};

struct SolveDiagnostic {
    double y = 0;
    std::string kind;     // "NoBracket"
    std::string message;
};

struct PeriodCurve {
    int k = 3;
    std::pair<double, double> x_window{-0.99, -0.01};
    std::vector<PeriodCurvePoint> points;
    std::vector<SolveDiagnostic> diagnostics;
};

enum class Corner { ZeroMinusOne, ZeroZero };  // (y,x) -> (0,-1) and (0,0)

// Real s-form integrand of I1 with t = y + s^{4k}. Accepts the corner values
// y = 0 and x in {-1, 0}.
double i1_integrand(int k, double y, double x, double s);

// Integrand of I2 in t for z = e^{it}, from the core evaluators.
double i2_integrand(const TowerParams& p, double t);

QuadratureResult integrate_I1(const TowerParams& p, double tol, int max_panels = 20000);
QuadratureResult integrate_I2(const TowerParams& p, double tol, int max_panels = 20000);

QuadratureResult corner_limit_I1(int k, Corner corner, double tol);
QuadratureResult corner_limit_I2(int k, Corner corner, double tol);

// (A, B) = definite integrals of 1/(1+s^6) and s^4/(1+s^6) over [0,1] from the
// explicit log/arctan antiderivatives.
std::pair<double, double> closed_form_k3();
double antiderivative_k3_A(double s);
double antiderivative_k3_B(double s);

// D = I1 - I2. The x2 coordinate of the period-path end point is (I2 - I1)/2,
// so D vanishes exactly when that point lies in the plane x2 = 0.
PeriodReport residual(const TowerParams& p, double tol);

struct SolveOptions {
    double tol = 1e-8;         // |D| target
    double quad_tol = 1e-11;   // per-integral quadrature tolerance
    int scan_points = 25;      // samples across the x window
    int max_bisections = 200;
};

PeriodCurve solve_period_curve(int k, const std::vector<double>& y_grid,
                               std::pair<double, double> x_window, const SolveOptions& opt = {});

std::vector<double> default_y_grid();

std::string period_curve_csv(const PeriodCurve& curve);

}  // namespace scherk
