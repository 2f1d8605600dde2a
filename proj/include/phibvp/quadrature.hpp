#pragma once

#include <functional>

namespace phibvp {

/// Composite trapezoid on [a, b] with n panels.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

/// Mean value of a T-periodic function over one period (rectangle rule on the
/// periodic grid, which coincides with the periodic trapezoid).
double periodic_mean(const std::function<double(double)>& f, double T, int n);

/// Adaptive Simpson with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 50);

}  // namespace phibvp
