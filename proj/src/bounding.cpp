#include "phibvp/bounding.hpp"

#include "phibvp/quadrature.hpp"
#include "phibvp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phibvp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double grad_step(const Vec& x) { return std::cbrt(kEps) * (1.0 + x.norm()); }
double hess_step(const Vec& x) { return std::pow(kEps, 0.25) * (1.0 + x.norm()); }

}  // namespace

Vec ScalarField::grad(const Vec& x) const {
  if (grad_) return grad_(x);
  return grad_fd(x);
}

Vec ScalarField::grad_fd(const Vec& x) const {
  const double h = grad_step(x);
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = ((*this)(xp) - (*this)(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

Mat ScalarField::hess(const Vec& x) const {
  Mat H;
  if (hess_) {
    H = hess_(x);
  } else if (grad_) {
    // differentiate the analytic gradient
    const double h = grad_step(x);
    H.resize(x.size(), x.size());
    Vec xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      H.col(i) = (grad_(xp) - grad_(xm)) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
  } else {
    H = hess_fd(x);
  }
  return 0.5 * (H + H.transpose());
}

Mat ScalarField::hess_fd(const Vec& x) const {
  const double h = hess_step(x);
  const Eigen::Index n = x.size();
  Mat H(n, n);
  const double f0 = (*this)(x);
  Vec w = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = x[i] + h;
    const double fp = (*this)(w);
    w[i] = x[i] - h;
    const double fm = (*this)(w);
    w[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      w[i] = x[i] + h;
      w[j] = x[j] + h;
      const double fpp = (*this)(w);
      w[j] = x[j] - h;
      const double fpm = (*this)(w);
      w[i] = x[i] - h;
      const double fmm = (*this)(w);
      w[j] = x[j] + h;
      const double fmp = (*this)(w);
      w[i] = x[i];
      w[j] = x[j];
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return 0.5 * (H + H.transpose());
}

BoundingFn BoundingFn::sphere(int n, double R) {
  auto value = [R](const Vec& x) { return 0.5 * (x.squaredNorm() - R * R); };
  auto grad = [](const Vec& x) { return x; };
  auto hess = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
  return BoundingFn(ScalarField(value, grad, hess), 0.0);
}

BoundingFn BoundingFn::quadratic_form(const Mat& Q, double level) {
  Mat Qs = 0.5 * (Q + Q.transpose());
  auto value = [Qs](const Vec& x) { return 0.5 * x.dot(Qs * x); };
  auto grad = [Qs](const Vec& x) { return Vec(Qs * x); };
  auto hess = [Qs](const Vec&) { return Qs; };
  return BoundingFn(ScalarField(value, grad, hess), level);
}

BoundingFn BoundingFn::peanut(double a, double b, double level) {
  auto value = [a, b](const Vec& x) {
    return a * std::pow(x[0], 4) / 4.0 - b * x[0] * x[0] + x[1] * x[1];
  };
  auto grad = [a, b](const Vec& x) {
    Vec g(2);
    g << a * std::pow(x[0], 3) - 2.0 * b * x[0], 2.0 * x[1];
    return g;
  };
  auto hess = [a, b](const Vec& x) {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = 3.0 * a * x[0] * x[0] - 2.0 * b;
    H(1, 1) = 2.0;
    return H;
  };
  return BoundingFn(ScalarField(value, grad, hess), level);
}

VectorField VectorField::autonomous(int n, double T, std::function<Vec(const Vec&)> f) {
  VectorField v;
  v.n = n;
  v.T = T;
  v.f_tx = [f = std::move(f)](double, const Vec& x) { return f(x); };
  return v;
}

VectorField VectorField::time_dependent(int n, double T,
                                        std::function<Vec(double, const Vec&)> f) {
  VectorField v;
  v.n = n;
  v.T = T;
  v.f_tx = std::move(f);
  return v;
}

VectorField VectorField::velocity_dependent(
    int n, double T, std::function<Vec(double, const Vec&, const Vec&)> f) {
  VectorField v;
  v.n = n;
  v.T = T;
  v.depends_on_y = true;
  v.f_txy = std::move(f);
  return v;
}

Vec VectorField::eval(double t, const Vec& x) const {
  if (depends_on_y) return f_txy(t, x, Vec::Zero(n));
  Vec out = f_tx(t, x);
  if (!out.allFinite()) throw EvaluationError("VectorField: non-finite value");
  return out;
}

Vec VectorField::eval(double t, const Vec& x, const Vec& y) const {
  Vec out = depends_on_y ? f_txy(t, x, y) : f_tx(t, x);
  if (!out.allFinite()) throw EvaluationError("VectorField: non-finite value");
  return out;
}

double membership_margin(const BoundSet& set, const Vec& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BallSet>) {
          return s.R - (x - s.center).norm();
        } else if constexpr (std::is_same_v<S, BoxSet>) {
          double m = std::numeric_limits<double>::infinity();
          for (Eigen::Index i = 0; i < x.size(); ++i)
            m = std::min({m, x[i] - s.lo[i], s.hi[i] - x[i]});
          return m;
        } else {
          return s.V.level() - s.V(x);
        }
      },
      set);
}

BoundarySample sample_boundary(const BoundingFn& V, const Vec& P0, int n_dirs,
                               double root_tol, double march_max, std::uint64_t seed) {
  if (!(V(P0) < V.level())) throw InputError("sample_boundary: V(P0) must be below the level");
  BoundarySample out;
  out.interior = P0;
  const double c = V.level();
  const auto dirs = unit_directions(static_cast<int>(P0.size()), n_dirs, seed);
  out.requested = static_cast<int>(dirs.size());
  for (const auto& d : dirs) {
    auto g = [&](double r) { return V(P0 + r * d) - c; };
    // march to the first sign change, then bisect
    double r_prev = 0.0, g_prev = g(0.0);
    double step = 0.01 * (1.0 + P0.norm());
    bool found = false;
    while (r_prev < march_max) {
      const double r = r_prev + step;
      const double gr = g(r);
      if (gr == 0.0 || (g_prev < 0.0) != (gr < 0.0)) {
        double lo = r_prev, hi = r;
        double u_r = hi;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid);
          if ((g_prev < 0.0) == (gm < 0.0))
            lo = mid;
          else
            hi = mid;
          u_r = 0.5 * (lo + hi);
          if (std::abs(g(u_r)) <= root_tol) break;
        }
        out.points.push_back(P0 + u_r * d);
        found = true;
        break;
      }
      r_prev = r;
      g_prev = gr;
      step = std::min(step * 1.3, march_max / 50.0);
    }
    if (!found) ++out.skipped;
  }
  if (static_cast<int>(out.points.size()) * 2 < out.requested)
    throw BoundarySamplingError(
        "sample_boundary: fewer than half the rays met the level set "
        "(unbounded sublevel set or misplaced interior point?)");
  return out;
}

HypothesisReport check_grad_nonvanishing(const BoundingFn& V,
                                         const std::vector<Vec>& boundary, double tol) {
  if (boundary.empty()) throw InputError("check_grad_nonvanishing: empty boundary");
  HypothesisReport rep;
  rep.condition_id = "cond_Vprime";
  double worst = std::numeric_limits<double>::infinity();
  Vec worst_u;
  for (const auto& u : boundary) {
    const double nrm = V.grad(u).norm();
    if (nrm < worst) {
      worst = nrm;
      worst_u = u;
    }
  }
  rep.margin = worst;
  if (worst >= tol) {
    rep.verdict = Verdict::HoldsAtSamples;
  } else {
    rep.verdict = Verdict::Violated;
    Witness w;
    w.x = worst_u;
    rep.witness = w;
  }
  return rep;
}

Mat tangent_basis(const Vec& g) {
  const double nrm = g.norm();
  if (!(nrm > 0.0)) throw InputError("tangent_basis: zero vector");
  const Eigen::Index n = g.size();
  if (n == 1) return Mat(1, 0);
  Vec ghat = g / nrm;
  // Householder reflector sending e_1 to -sign(g_1) ghat; its trailing columns
  // are an orthonormal basis of the tangent hyperplane.
  Vec v = ghat;
  const double s = (ghat[0] >= 0.0) ? 1.0 : -1.0;
  v[0] += s;
  const double vtv = v.squaredNorm();
  Mat H = Mat::Identity(n, n) - (2.0 / vtv) * (v * v.transpose());
  return H.rightCols(n - 1);
}

ConditionCResult check_condition_C(const BoundingFn& V, const Vec& u, double tol) {
  ConditionCResult res;
  const Vec g = V.grad(u);
  if (g.norm() < 1e-12)
    throw GradientVanishedError("check_condition_C: gradient vanished at boundary point");
  if (u.size() == 1) {
    // empty tangent space: vacuously positive semi-definite
    res.min_tangent_eig = std::numeric_limits<double>::infinity();
    res.verdict = Verdict::HoldsAtSamples;
    return res;
  }
  const Mat Q = tangent_basis(g);
  const Mat B = Q.transpose() * V.hess(u) * Q;
  Eigen::SelfAdjointEigenSolver<Mat> eig(B);
  res.min_tangent_eig = eig.eigenvalues().minCoeff();
  res.verdict = (res.min_tangent_eig >= -tol) ? Verdict::HoldsAtSamples : Verdict::Violated;
  return res;
}

HVOptions HVOptions::defaults(double T, double y_max) {
  HVOptions opt;
  opt.t_grid.resize(64);
  for (int j = 0; j < 64; ++j) opt.t_grid[static_cast<std::size_t>(j)] = T * j / 64.0;
  for (int j = 0; j < 11; ++j) opt.lambda_grid.push_back(j / 11.0);
  opt.lambda_grid.push_back(1.0 - 1e-3);
  opt.tangent_radii.push_back(0.0);
  if (y_max > 0.0)
    for (double r : geomspace(y_max * 1e-3, y_max, 7)) opt.tangent_radii.push_back(r);
  return opt;
}

HypothesisReport check_HV(const BoundingFn& V, const HomotopyFamily& family,
                          const PhiMap& phi, const std::vector<Vec>& boundary,
                          const HVOptions& opt) {
  if (boundary.empty()) throw InputError("check_HV: empty boundary");
  HypothesisReport rep;
  rep.condition_id = "H_V";
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;
  const int n = static_cast<int>(boundary.front().size());

  for (const auto& u : boundary) {
    const Vec g = V.grad(u);
    if (g.norm() < 1e-12)
      throw GradientVanishedError("check_HV: gradient vanished at boundary point");
    const Mat H = V.hess(u);
    // tangent velocities y = r * q, q a unit direction with <V'(u), q> = 0
    std::vector<Vec> tangent_dirs;
    if (n >= 2) {
      const Mat Q = tangent_basis(g);
      if (n == 2) {
        tangent_dirs.push_back(Q.col(0));
        tangent_dirs.push_back(-Q.col(0));
      } else {
        for (const auto& dt : unit_directions(n - 1, opt.tangent_dirs))
          tangent_dirs.push_back(Q * dt);
      }
    }
    for (double r : opt.tangent_radii) {
      std::vector<Vec> ys;
      if (r == 0.0) {
        ys.push_back(Vec::Zero(n));
      } else {
        for (const auto& q : tangent_dirs) ys.push_back(r * q);
      }
      for (const auto& y : ys) {
        const Vec phiy = phi.apply(y);
        const double curvature_term = (H * y).dot(phiy);
        for (double t : opt.t_grid) {
          for (double lam : opt.lambda_grid) {
            const double expr = curvature_term + g.dot(family.eval(t, u, y, lam));
            if (expr < margin) {
              margin = expr;
              worst.t = t;
              worst.lambda = lam;
              worst.x = u;
              worst.y = y;
            }
          }
        }
      }
    }
  }
  rep.margin = margin;
  if (margin > opt.strict_margin) {
    rep.verdict = Verdict::HoldsAtSamples;
  } else if (margin <= 0.0) {
    rep.verdict = Verdict::Violated;
    rep.witness = worst;
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.witness = worst;
    rep.note = "minimum positive but below the strictness margin";
  }
  return rep;
}

HypothesisReport check_hartman(const VectorField& f, double R,
                               const std::vector<double>& t_grid, int sphere_dirs) {
  if (!(R > 0.0)) throw InputError("check_hartman: R must be positive");
  HypothesisReport rep;
  rep.condition_id = "hartman";
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;
  for (const auto& d : unit_directions(f.n, sphere_dirs)) {
    const Vec x = R * d;
    for (double t : t_grid) {
      const double v = f.eval(t, x).dot(x);
      if (v < margin) {
        margin = v;
        worst.t = t;
        worst.x = x;
      }
    }
  }
  rep.margin = margin;
  rep.verdict = (margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
  if (rep.verdict == Verdict::Violated) rep.witness = worst;
  return rep;
}

HypothesisReport check_poincare_miranda(const VectorField& f, const BoxSet& box,
                                        const std::vector<double>& t_grid,
                                        int face_samples, std::uint64_t seed) {
  const int n = f.n;
  for (Eigen::Index i = 0; i < box.lo.size(); ++i)
    if (!(box.lo[i] < box.hi[i])) throw InputError("check_poincare_miranda: degenerate box");
  HypothesisReport rep;
  rep.condition_id = "poincare_miranda";
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;

  // points on the face x_i = v, sampled over the remaining coordinates
  auto face_points = [&](int i, double v) {
    std::vector<Vec> pts;
    if (n == 1) {
      pts.push_back(Vec::Constant(1, v));
      return pts;
    }
    Vec lo(n - 1), hi(n - 1);
    int k = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      lo[k] = box.lo[j];
      hi[k] = box.hi[j];
      ++k;
    }
    std::vector<Vec> free_pts;
    if (n - 1 <= 2) {
      // tensor grid, corners included
      std::vector<std::vector<double>> axes;
      for (int a = 0; a < n - 1; ++a) axes.push_back(linspace(lo[a], hi[a], face_samples));
      if (n - 1 == 1) {
        for (double u : axes[0]) free_pts.push_back(Vec::Constant(1, u));
      } else {
        for (double u : axes[0])
          for (double w : axes[1]) {
            Vec q(2);
            q << u, w;
            free_pts.push_back(q);
          }
      }
    } else {
      free_pts = uniform_points_in_box(lo, hi, face_samples * face_samples, seed);
    }
    for (const auto& q : free_pts) {
      Vec x(n);
      int m = 0;
      for (int j = 0; j < n; ++j) x[j] = (j == i) ? v : q[m++];
      pts.push_back(x);
    }
    return pts;
  };

  for (int i = 0; i < n; ++i) {
    for (int side = 0; side < 2; ++side) {
      const double v = (side == 0) ? box.lo[i] : box.hi[i];
      const double sign = (side == 0) ? -1.0 : 1.0;  // f_i <= 0 on lo, >= 0 on hi
      for (const auto& x : face_points(i, v)) {
        for (double t : t_grid) {
          const double slack = sign * f.eval(t, x)[i];
          if (slack < margin) {
            margin = slack;
            worst.t = t;
            worst.x = x;
          }
        }
      }
    }
  }
  rep.margin = margin;
  rep.verdict = (margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
  if (rep.verdict == Verdict::Violated) rep.witness = worst;
  return rep;
}

HypothesisReport check_outer_normal(const VectorField& f,
                                    const std::vector<std::pair<Vec, Vec>>& normals,
                                    const std::vector<double>& t_grid, const Vec& P) {
  HypothesisReport rep;
  rep.condition_id = "outer_normal";
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;
  for (const auto& [u, nu] : normals) {
    if (!(nu.norm() > 0.0)) throw InputError("check_outer_normal: zero normal");
    if (!((u - P).dot(nu) > 0.0))
      throw NotOuterNormalError("check_outer_normal: supporting-hyperplane check failed");
    for (double t : t_grid) {
      const double v = f.eval(t, u).dot(nu);
      if (v < margin) {
        margin = v;
        worst.t = t;
        worst.x = u;
      }
    }
  }
  rep.margin = margin;
  rep.verdict = (margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
  if (rep.verdict == Verdict::Violated) rep.witness = worst;
  return rep;
}

LienardParams LienardParams::defaults(int n, double R, double d) {
  LienardParams p;
  p.R = R;
  p.d = d;
  const double r_max = 100.0 * std::max({R, d, 1.0});
  p.radii = geomspace(0.05, r_max, 48);
  if (n == 2) {
    for (int k = 0; k < 16; ++k) {
      const double th = 2.0 * M_PI * k / 16.0;
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      p.directions.push_back(dir);
    }
    // rational slopes exercised by the componentwise sign condition
    for (double sx : {1.0, -1.0})
      for (double sy : {1.0, -1.0}) {
        Vec d12(2), d21(2);
        d12 << sx / std::sqrt(5.0), sy * 2.0 / std::sqrt(5.0);
        d21 << sx * 2.0 / std::sqrt(5.0), sy / std::sqrt(5.0);
        p.directions.push_back(d12);
        p.directions.push_back(d21);
      }
  } else {
    p.directions = signed_directions(n, std::max(8, 4 * n));
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = 1.0;
      p.directions.push_back(e);
      p.directions.push_back(-e);
    }
  }
  p.y_offsets_unit.push_back(Vec::Zero(n));
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    p.y_offsets_unit.push_back(e);
    p.y_offsets_unit.push_back(-e);
  }
  if (n == 2) {
    for (int k = 1; k < 8; k += 2) {
      const double th = 2.0 * M_PI * k / 8.0;
      Vec yo(2);
      yo << std::cos(th), std::sin(th);
      p.y_offsets_unit.push_back(yo);
    }
  }
  return p;
}

std::map<std::string, HypothesisReport> check_lienard_conditions(
    const VectorField& h, const LienardParams& params) {
  if (params.radii.empty() || params.directions.empty())
    throw InputError("check_lienard_conditions: empty sample plan");
  std::map<std::string, HypothesisReport> out;
  std::vector<double> radii = params.radii;
  std::sort(radii.begin(), radii.end());
  const double r_max = radii.back();
  if (r_max < 10.0 * std::max(params.R, params.d))
    throw InputError("check_lienard_conditions: radii must reach 10 max(R, d)");

  // (H_H): <h(t,x), x> >= 0 for ||x|| >= R, and the global minimum for (H_H+)
  double hh_margin = std::numeric_limits<double>::infinity();
  double global_min = std::numeric_limits<double>::infinity();
  Witness hh_worst, global_worst;
  // per-sphere minima for condition (i)
  std::vector<double> sphere_min(radii.size(), std::numeric_limits<double>::infinity());
  std::vector<Vec> sphere_argmin(radii.size());
  std::vector<double> sphere_t(radii.size(), 0.0);

  auto track_pointwise = [&](double t, const Vec& x) {
    const double v = h.eval(t, x).dot(x);
    if (v < global_min) {
      global_min = v;
      global_worst.t = t;
      global_worst.x = x;
    }
    if (x.norm() >= params.R && v < hh_margin) {
      hh_margin = v;
      hh_worst.t = t;
      hh_worst.x = x;
    }
    return v;
  };

  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    for (const auto& dir : params.directions) {
      const Vec x = r * dir;
      for (double t : params.t_grid) {
        const double v = track_pointwise(t, x);
        if (v < sphere_min[k]) {
          sphere_min[k] = v;
          sphere_argmin[k] = x;
          sphere_t[k] = t;
        }
      }
    }
  }
  for (const auto& [px, py] : params.probes)
    for (double t : params.t_grid) track_pointwise(t, px);

  {
    HypothesisReport rep;
    rep.condition_id = "H_H";
    rep.margin = hh_margin;
    rep.verdict = (hh_margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
    if (rep.verdict == Verdict::Violated) rep.witness = hh_worst;
    out["H_H"] = rep;
  }
  {
    HypothesisReport rep;
    rep.condition_id = "H_H_plus";
    rep.margin = global_min;  // empirical K0 = max(0, -margin)
    rep.verdict = Verdict::HoldsAtSamples;
    rep.note = "empirical K0 = " + std::to_string(std::max(0.0, -global_min));
    out["H_H_plus"] = rep;
  }

  // (i): sphere minima increasing across the top decade and above the
  // threshold on the largest sphere
  {
    HypothesisReport rep;
    rep.condition_id = "lienard_i";
    bool increasing = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < radii.size(); ++k) {
      if (radii[k] < r_max / 10.0) continue;
      if (sphere_min[k] < prev - 1e-12 * (1.0 + std::abs(prev))) increasing = false;
      prev = sphere_min[k];
    }
    const double top = sphere_min.back();
    rep.margin = top - params.i_threshold;
    if (increasing && top > params.i_threshold) {
      rep.verdict = Verdict::HoldsAtSamples;
    } else {
      rep.verdict = Verdict::Violated;
      Witness w;
      w.x = sphere_argmin.back();
      w.t = sphere_t.back();
      rep.witness = w;
      rep.note = increasing ? "top-sphere minimum below threshold"
                            : "sphere minima not increasing on the top decade";
    }
    out["lienard_i"] = rep;
  }

  // (ii): for each rho find the smallest sampled R_rho beyond which
  // <h(t, x+y), x> >= 0 for all sampled ||y|| <= rho
  {
    HypothesisReport rep;
    rep.condition_id = "lienard_ii";
    rep.verdict = Verdict::HoldsAtSamples;
    rep.margin = std::numeric_limits<double>::infinity();
    std::string note;
    for (double rho : params.rho_list) {
      // worst value per radius over all admissible offsets; probe pairs are
      // merged in at radius ||x||
      struct Entry {
        double radius;
        double worst;
        Witness w;
      };
      std::vector<Entry> entries;
      entries.reserve(radii.size() + params.probes.size());
      for (std::size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        Entry e{r, std::numeric_limits<double>::infinity(), {}};
        for (const auto& dir : params.directions) {
          const Vec x = r * dir;
          for (const auto& yu : params.y_offsets_unit) {
            for (double scale : {1.0, 0.5}) {
              const Vec y = rho * scale * yu;
              for (double t : params.t_grid) {
                const double v = h.eval(t, x + y).dot(x);
                if (v < e.worst) {
                  e.worst = v;
                  e.w.t = t;
                  e.w.x = x;
                  e.w.y = y;
                }
              }
              if (yu.norm() == 0.0) break;  // zero offset has a single scale
            }
          }
        }
        entries.push_back(std::move(e));
      }
      for (const auto& [px, py] : params.probes) {
        if (py.norm() > rho * (1.0 + 1e-12)) continue;
        Entry e{px.norm(), std::numeric_limits<double>::infinity(), {}};
        for (double t : params.t_grid) {
          const double v = h.eval(t, px + py).dot(px);
          if (v < e.worst) {
            e.worst = v;
            e.w.t = t;
            e.w.x = px;
            e.w.y = py;
          }
        }
        entries.push_back(std::move(e));
      }
      std::sort(entries.begin(), entries.end(),
                [](const Entry& a, const Entry& b) { return a.radius < b.radius; });
      // smallest candidate radius with every strictly larger entry passing
      std::vector<double> suffix(entries.size());
      double suffix_min = std::numeric_limits<double>::infinity();
      for (std::size_t k = entries.size(); k-- > 0;) {
        suffix_min = std::min(suffix_min, entries[k].worst);
        suffix[k] = suffix_min;
      }
      std::optional<std::size_t> candidate;
      for (std::size_t k = 0; k + 1 < entries.size(); ++k) {
        if (suffix[k + 1] >= 0.0) {
          candidate = k;
          break;
        }
      }
      if (candidate) {
        note += "R_rho(" + std::to_string(rho) + ") ~ " +
                std::to_string(entries[*candidate].radius) + "; ";
        rep.margin = std::min(rep.margin, suffix[*candidate + 1]);
      } else {
        rep.verdict = Verdict::Violated;
        // witness on the largest radius that still fails
        for (std::size_t k = entries.size(); k-- > 0;) {
          if (entries[k].worst < 0.0) {
            rep.witness = entries[k].w;
            rep.margin = entries[k].worst;
            break;
          }
        }
        note += "no R_rho for rho = " + std::to_string(rho) + "; ";
      }
    }
    rep.note = note;
    out["lienard_ii"] = rep;
  }

  // (iii): h_i(t,x) x_i >= 0 whenever |x_i| > d
  {
    HypothesisReport rep;
    rep.condition_id = "lienard_iii";
    double margin = std::numeric_limits<double>::infinity();
    Witness worst;
    bool any = false;
    auto scan_point = [&](double t, const Vec& x) {
      Vec hv;
      bool have = false;
      for (int i = 0; i < h.n; ++i) {
        if (std::abs(x[i]) <= params.d) continue;
        if (!have) {
          hv = h.eval(t, x);
          have = true;
        }
        any = true;
        const double v = hv[i] * x[i];
        if (v < margin) {
          margin = v;
          worst.t = t;
          worst.x = x;
        }
      }
    };
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double r = radii[k];
      for (const auto& dir : params.directions)
        for (double t : params.t_grid) scan_point(t, r * dir);
    }
    for (const auto& [px, py] : params.probes)
      for (double t : params.t_grid) scan_point(t, px);
    if (!any) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = "no sample has |x_i| > d";
    } else {
      rep.margin = margin;
      rep.verdict = (margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
      if (rep.verdict == Verdict::Violated) rep.witness = worst;
    }
    out["lienard_iii"] = rep;
  }

  return out;
}

HypothesisReport check_villari(const VectorField& h, double d, double T,
                               const std::vector<Vec>& trial_points, int quad_N,
                               double tol) {
  HypothesisReport rep;
  rep.condition_id = "villari";
  if (trial_points.empty()) throw InputError("check_villari: no trial paths");
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;
  for (const auto& xbar : trial_points) {
    if (xbar.cwiseAbs().maxCoeff() <= d)
      throw InputError("check_villari: trial path has no component beyond d");
    double best = 0.0;
    for (int i = 0; i < h.n; ++i) {
      const double I = trapezoid(
          [&](double t) { return h.eval(t, xbar)[i]; }, 0.0, T, quad_N);
      best = std::max(best, std::abs(I));
    }
    if (best < margin) {
      margin = best;
      worst.x = xbar;
    }
  }
  rep.margin = margin;
  if (margin > tol) {
    rep.verdict = Verdict::HoldsAtSamples;
  } else {
    rep.verdict = Verdict::Violated;
    rep.witness = worst;
  }
  return rep;
}

RayleighStructure check_rayleigh_structure(const std::function<Vec(const Vec&)>& g,
                                           const ScalarField& G, const PhiMap& phi,
                                           const std::vector<Vec>& y_samples,
                                           double parallel_tol) {
  RayleighStructure res;
  res.parallel.condition_id = "rayleigh_parallel";
  res.bounded.condition_id = "rayleigh_bounded";
  if (y_samples.empty()) throw InputError("check_rayleigh_structure: no samples");

  double worst_excess = -std::numeric_limits<double>::infinity();
  Witness par_worst;
  std::vector<std::pair<double, double>> diff_by_norm;  // (||y||, ||g - grad G o phi||)
  for (const auto& y : y_samples) {
    const Vec gy = g(y);
    const double ny = y.norm();
    double excess;
    if (ny == 0.0) {
      excess = gy.norm() - parallel_tol;  // continuity forces g(0) = 0
    } else {
      const Vec yhat = y / ny;
      const Vec transverse = gy - gy.dot(yhat) * yhat;
      excess = transverse.norm() - parallel_tol * std::max(gy.norm(), 1e-300);
    }
    if (excess > worst_excess) {
      worst_excess = excess;
      par_worst.y = y;
    }
    diff_by_norm.emplace_back(ny, (gy - G.grad(phi.apply(y))).norm());
  }
  res.parallel.margin = -worst_excess;
  if (worst_excess <= 0.0) {
    res.parallel.verdict = Verdict::HoldsAtSamples;
  } else {
    res.parallel.verdict = Verdict::Violated;
    res.parallel.witness = par_worst;
  }

  double L = 0.0;
  double max_all = 0.0, max_top = 0.0, max_prev = 0.0, top_norm = 0.0;
  for (const auto& [ny, dv] : diff_by_norm) top_norm = std::max(top_norm, ny);
  for (const auto& [ny, dv] : diff_by_norm) {
    max_all = std::max(max_all, dv);
    if (ny >= top_norm / 10.0)
      max_top = std::max(max_top, dv);
    else if (ny >= top_norm / 100.0)
      max_prev = std::max(max_prev, dv);
  }
  L = max_all;
  res.L = L;
  res.bounded.margin = L;
  const bool growing = max_top > (1.0 + 0.1) * std::max(max_prev, 1e-12) && max_top > 1e-9;
  if (growing) {
    res.bounded.verdict = Verdict::Inconclusive;
    res.bounded.note = "difference grows across the top sampled decade";
  } else {
    res.bounded.verdict = Verdict::HoldsAtSamples;
    res.bounded.note = "empirical bound L = " + std::to_string(L);
  }
  return res;
}

}  // namespace phibvp
