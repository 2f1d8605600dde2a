#include "phibvp/quadrature.hpp"

#include "phibvp/types.hpp"

#include <cmath>

namespace phibvp {

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 1) throw InputError("trapezoid: need at least one panel");
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int j = 1; j < n; ++j) acc += f(a + h * j);
  return acc * h;
}

double periodic_mean(const std::function<double(double)>& f, double T, int n) {
  if (n < 1) throw InputError("periodic_mean: need at least one node");
  const double h = T / n;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += f(h * j);
  return acc / n;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace phibvp
