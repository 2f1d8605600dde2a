#include "phibvp/rootfind.hpp"

#include <cmath>

namespace phibvp {

std::optional<std::pair<double, double>> expand_bracket_upward(const ScalarFn& f, double lo,
                                                               double hi0, int max_doublings) {
  double flo = f(lo);
  if (flo == 0.0) return std::make_pair(lo, lo);
  double hi = hi0;
  for (int k = 0; k < max_doublings; ++k) {
    const double fhi = f(hi);
    if (!std::isfinite(fhi)) return std::nullopt;
    if (fhi == 0.0 || (flo < 0.0) != (fhi < 0.0)) return std::make_pair(lo, hi);
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    if (!std::isfinite(hi)) break;
  }
  return std::nullopt;
}

double solve_bracketed(const ScalarFn& f, double lo, double hi, double xtol, double ftol,
                       int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw InputError("solve_bracketed: no sign change");
  double x = lo, fx = flo;
  for (int it = 0; it < max_iter; ++it) {
    // secant proposal, guarded by the bracket
    double xs = hi - fhi * (hi - lo) / (fhi - flo);
    const double mid = 0.5 * (lo + hi);
    if (!(xs > lo && xs < hi)) xs = mid;
    // alternate with plain bisection so the bracket provably shrinks
    x = (it % 2 == 0) ? xs : mid;
    fx = f(x);
    if (std::abs(fx) <= ftol || (hi - lo) <= xtol) return x;
    if ((flo < 0.0) == (fx < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return 0.5 * (lo + hi);
}

double newton_in_bracket(const ScalarFn& f, const ScalarFn& df, double x0, double lo,
                         double hi, double xtol, int max_iter) {
  double x = x0;
  double fx = f(x);
  double flo = f(lo);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fx) == 0.0) return x;
    const double d = df(x);
    double xn = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn >= lo && xn <= hi)) xn = 0.5 * (lo + hi);
    const double fn = f(xn);
    // keep the sign-changing bracket current
    if ((flo < 0.0) == (fn < 0.0)) {
      lo = xn;
      flo = fn;
    } else {
      hi = xn;
    }
    if (std::abs(xn - x) <= xtol * (1.0 + std::abs(xn))) return xn;
    x = xn;
    fx = fn;
  }
  return x;
}

}  // namespace phibvp
