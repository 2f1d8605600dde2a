#include "phibvp/convexity.hpp"

#include "phibvp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace phibvp {

const char* to_string(ConvexityStatus s) {
  switch (s) {
    case ConvexityStatus::ConvexAtSamples: return "convex_at_samples";
    case ConvexityStatus::Nonconvex: return "nonconvex";
    case ConvexityStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

ConvexityVerdict convexity_via_condition_C(const BoundingFn& V, const Vec& P0, int n_dirs,
                                           double tol, double root_tol) {
  ConvexityVerdict verdict;
  BoundarySample boundary;
  try {
    boundary = sample_boundary(V, P0, n_dirs, root_tol);
  } catch (const BoundarySamplingError& e) {
    verdict.status = ConvexityStatus::Inconclusive;
    verdict.precondition_ok = false;
    verdict.note = e.what();
    return verdict;
  }
  const auto grad_rep = check_grad_nonvanishing(V, boundary.points, 1e-8);
  if (!grad_rep.holds()) {
    verdict.status = ConvexityStatus::Inconclusive;
    verdict.precondition_ok = false;
    verdict.note = "V' vanishes on the sampled level set; lemma inapplicable";
    if (grad_rep.witness) verdict.witness = grad_rep.witness->x;
    return verdict;
  }
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& u : boundary.points) {
    const auto res = check_condition_C(V, u, tol);
    if (res.min_tangent_eig < min_eig) min_eig = res.min_tangent_eig;
    if (res.verdict == Verdict::Violated) {
      verdict.status = ConvexityStatus::Nonconvex;
      verdict.witness = u;
      verdict.min_tangent_eig = res.min_tangent_eig;
      return verdict;
    }
  }
  verdict.status = ConvexityStatus::ConvexAtSamples;
  verdict.min_tangent_eig = min_eig;
  if (boundary.skipped > 0)
    verdict.note = std::to_string(boundary.skipped) + " rays skipped (partial coverage)";
  return verdict;
}

namespace {

// axis-aligned box enclosing the sampled boundary, padded slightly
std::pair<Vec, Vec> bounding_box(const std::vector<Vec>& pts) {
  Vec lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec pad = 0.05 * (hi - lo).cwiseMax(1e-6);
  return {lo - pad, hi + pad};
}

}  // namespace

ConvexityVerdict convexity_oracle(const BoundingFn& V, const Vec& P0,
                                  const ChordOracleOptions& opt) {
  ConvexityVerdict verdict;
  Vec lo, hi;
  if (opt.box) {
    lo = opt.box->first;
    hi = opt.box->second;
  } else {
    const auto boundary = sample_boundary(V, P0, 64, 1e-9);
    std::tie(lo, hi) = bounding_box(boundary.points);
  }
  const double c = V.level();

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw_in_D = [&]() -> Vec {
    long long budget =
        static_cast<long long>(opt.max_attempts_factor);
    for (long long k = 0; k < budget; ++k) {
      Vec x(lo.size());
      for (Eigen::Index i = 0; i < lo.size(); ++i)
        x[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
      if (V(x) <= c) return x;
    }
    throw SamplingError("convexity_oracle: acceptance rate below 1e-4");
  };

  for (int pair = 0; pair < opt.n_pairs; ++pair) {
    const Vec a = draw_in_D();
    const Vec b = draw_in_D();
    for (int k = 1; k <= opt.chord_points; ++k) {
      const double th = static_cast<double>(k) / (opt.chord_points + 1);
      const Vec m = th * a + (1.0 - th) * b;
      if (V(m) > c + opt.oracle_tol) {
        verdict.status = ConvexityStatus::Nonconvex;
        verdict.witness = m;
        verdict.note = "chord point left the sublevel set";
        return verdict;
      }
    }
  }
  verdict.status = ConvexityStatus::ConvexAtSamples;
  return verdict;
}

ConnectednessResult connectedness_probe(const BoundingFn& V, const Vec& P0, int n_points,
                                        int segment_checks, std::uint64_t seed,
                                        std::optional<std::pair<Vec, Vec>> box) {
  ConnectednessResult res;
  const double c = V.level();
  Vec lo, hi;
  if (box) {
    lo = box->first;
    hi = box->second;
  } else {
    BoundarySample boundary;
    try {
      boundary = sample_boundary(V, P0, 64, 1e-9);
    } catch (const BoundarySamplingError&) {
      return res;  // inconclusive
    }
    std::tie(lo, hi) = bounding_box(boundary.points);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> pts;
  long long attempts = 0;
  const long long max_attempts = 10000LL * std::max(n_points, 1);
  while (static_cast<int>(pts.size()) < n_points && attempts < max_attempts) {
    ++attempts;
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
    if (V(x) <= c) pts.push_back(x);
  }
  res.samples_used = static_cast<int>(pts.size());
  if (res.samples_used < std::max(4, n_points / 4)) return res;  // too sparse

  // union-find over segment-connected pairs
  std::vector<int> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      bool inside = true;
      for (int k = 1; k <= segment_checks; ++k) {
        const double th = static_cast<double>(k) / (segment_checks + 1);
        if (V(th * pts[i] + (1.0 - th) * pts[j]) > c) {
          inside = false;
          break;
        }
      }
      if (inside) unite(static_cast<int>(i), static_cast<int>(j));
    }
  }
  int components = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++components;
  res.components = components;
  res.status = (components == 1) ? Connectedness::ConnectedAtSamples
                                 : Connectedness::Disconnected;
  return res;
}

std::vector<double> adaptive_chart_grid(const BoundingFn& V, const Vec& u0, const Vec& v,
                                        double beta_max, int count, double fd_step,
                                        int max_halvings) {
  double radius = beta_max;
  for (int k = 0; k < max_halvings; ++k) {
    const auto grid = linspace(-radius, radius, count);
    const auto pts = implicit_graph_curvature(V, u0, v, grid, fd_step);
    bool all_in_chart = true;
    for (const auto& cp : pts)
      if (!cp.in_chart) {
        all_in_chart = false;
        break;
      }
    if (all_in_chart) return grid;
    radius *= 0.5;
  }
  throw InputError("adaptive_chart_grid: no chart radius found");
}

std::vector<ChartPoint> implicit_graph_curvature(const BoundingFn& V, const Vec& u0,
                                                 const Vec& v,
                                                 const std::vector<double>& beta_grid,
                                                 double fd_step) {
  const Vec g0 = V.grad(u0);
  const double g0n = g0.norm();
  if (!(g0n > 0.0)) throw InputError("implicit_graph_curvature: V'(u0) = 0");
  const Vec w = g0 / g0n;
  if (std::abs(w.dot(v)) > 1e-8 * v.norm())
    throw InputError("implicit_graph_curvature: v must be tangent at u0");
  const double c = V.level();

  // solve V(u0 + alpha w + beta v) = c for alpha, Newton on the ray with the
  // analytic directional derivative <V'(u), w>, bracket fallback
  auto solve_theta = [&](double beta, double guess, bool& ok) -> double {
    auto val = [&](double a) { return V(u0 + a * w + beta * v) - c; };
    auto dval = [&](double a) { return V.grad(u0 + a * w + beta * v).dot(w); };
    double a = guess;
    for (int it = 0; it < 100; ++it) {
      const double f = val(a);
      const double d = dval(a);
      if (!(d > 0.0)) break;  // left the chart where <V', w> > 0
      const double an = a - f / d;
      if (std::abs(an - a) <= 1e-15 * (1.0 + std::abs(an))) {
        ok = std::abs(val(an)) <= 1e-10 * (1.0 + std::abs(c));
        return an;
      }
      a = an;
    }
    ok = std::abs(val(a)) <= 1e-10 * (1.0 + std::abs(c));
    return a;
  };

  std::vector<ChartPoint> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    ChartPoint cp;
    cp.beta = beta;
    bool ok0 = false, okp = false, okm = false;
    const double th0 = solve_theta(beta, 0.0, ok0);
    const double thp = solve_theta(beta + fd_step, th0, okp);
    const double thm = solve_theta(beta - fd_step, th0, okm);
    if (!(ok0 && okp && okm)) {
      out.push_back(cp);  // out_of_chart
      continue;
    }
    cp.in_chart = true;
    cp.theta = th0;
    const double dth = (thp - thm) / (2.0 * fd_step);
    cp.theta2_fd = (thp - 2.0 * th0 + thm) / (fd_step * fd_step);
    const Vec u = u0 + th0 * w + beta * v;
    const Vec y = dth * w + v;
    const double denom = V.grad(u).dot(w);
    cp.theta2_formula = -(V.hess(u) * y).dot(y) / denom;
    out.push_back(cp);
  }
  return out;
}

}  // namespace phibvp
