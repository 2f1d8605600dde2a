#include "phibvp/sampling.hpp"

#include <cmath>

namespace phibvp {

std::vector<double> linspace(double a, double b, int count) {
  if (count <= 0) throw InputError("linspace: count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = a;
    return out;
  }
  const double step = (b - a) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = a + step * i;
  out.back() = b;
  return out;
}

std::vector<double> geomspace(double a, double b, int count) {
  if (a <= 0.0 || b <= 0.0) throw InputError("geomspace: endpoints must be positive");
  if (count <= 0) throw InputError("geomspace: count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = a;
    return out;
  }
  const double r = std::log(b / a) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = a * std::exp(r * i);
  out.back() = b;
  return out;
}

std::vector<Vec> unit_directions(int n, int count, std::uint64_t seed) {
  if (n <= 0) throw InputError("unit_directions: dimension must be positive");
  if (count <= 0) throw InputError("unit_directions: count must be positive");
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    if (count > 1) dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * M_PI * k / count;
      Vec d(2);
      d << std::cos(th), std::sin(th);
      dirs.push_back(d);
    }
    return dirs;
  }
  if (n == 3) {
    // Fibonacci sphere
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * k;
      Vec d(3);
      d << r * std::cos(th), r * std::sin(th), z;
      dirs.push_back(d);
    }
    return dirs;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(dirs.size()) < count) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    const double nrm = d.norm();
    if (nrm > 1e-12) dirs.push_back(d / nrm);
  }
  return dirs;
}

std::vector<Vec> signed_directions(int n, int count, std::uint64_t seed) {
  if (n == 1) return unit_directions(1, 2, seed);
  auto base = unit_directions(n, count, seed);
  std::vector<Vec> out;
  out.reserve(base.size() * 2);
  for (const auto& d : base) {
    out.push_back(d);
    out.push_back(-d);
  }
  return out;
}

std::vector<Vec> uniform_points_in_box(const Vec& lo, const Vec& hi, int count,
                                       std::uint64_t seed) {
  if (lo.size() != hi.size()) throw InputError("uniform_points_in_box: size mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
    pts.push_back(x);
  }
  return pts;
}

}  // namespace phibvp
