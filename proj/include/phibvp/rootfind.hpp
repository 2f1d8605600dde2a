#pragma once

#include "phibvp/types.hpp"

#include <functional>
#include <optional>

namespace phibvp {

using ScalarFn = std::function<double(double)>;

/// Expands [lo, hi] upward by doubling hi until f changes sign relative to
/// f(lo). Returns the bracket or nullopt when the budget is exhausted.
std::optional<std::pair<double, double>> expand_bracket_upward(const ScalarFn& f, double lo,
                                                               double hi0,
                                                               int max_doublings = 200);

/// Derivative-free root solve on a sign-changing bracket: bisection steps
/// interleaved with secant proposals that are accepted only when they stay
/// inside the current bracket. Stops once |f| <= ftol or the bracket width
/// drops below xtol.
double solve_bracketed(const ScalarFn& f, double lo, double hi, double xtol, double ftol,
                       int max_iter = 200);

/// Newton iteration with a confining bracket; falls back to bisection when a
/// step leaves [lo, hi] or fails to reduce |f|.
double newton_in_bracket(const ScalarFn& f, const ScalarFn& df, double x0, double lo,
                         double hi, double xtol, int max_iter = 100);

}  // namespace phibvp
