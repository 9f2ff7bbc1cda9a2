#pragma once

#include <functional>

namespace csjl {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss–Kronrod integration of f over [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                double abs_tol = 0.0, int max_intervals = 2000);

}  // namespace csjl
