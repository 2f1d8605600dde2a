#include "phibvp/bvp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace phibvp {

namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08;  // sqrt(machine epsilon)

double max_norm(const Vec& r) { return r.cwiseAbs().maxCoeff(); }

}  // namespace

PeriodicCollocation::PeriodicCollocation(HomotopyFamily problem, PhiMap phi, int N)
    : problem_(std::move(problem)), phi_(std::move(phi)), N_(N) {
  if (N_ < 2) throw InputError("PeriodicCollocation: need at least two mesh nodes");
  if (problem_.n != phi_.dimension())
    throw InputError("PeriodicCollocation: dimension mismatch between field and phi");
  h_ = problem_.T / N_;
}

void PeriodicCollocation::node_caches(const Mat& x, const Mat& y, double lambda, Mat& v,
                                      Mat& Fv) const {
  const int n = problem_.n;
  v.resize(N_, n);
  Fv.resize(N_, n);
  for (int j = 0; j < N_; ++j) {
    const Vec yj = y.row(j);
    const Vec vj = phi_.invert(yj);
    v.row(j) = vj;
    Fv.row(j) = problem_.eval(h_ * j, x.row(j), vj, lambda);
  }
}

Vec PeriodicCollocation::residual_from_caches(const Mat& x, const Mat& v, const Mat& y,
                                              const Mat& Fv) const {
  const int n = problem_.n;
  Vec R(2 * n * N_);
  for (int j = 0; j < N_; ++j) {
    const int jp = (j + 1) % N_;
    for (int i = 0; i < n; ++i) {
      R[j * n + i] = x(jp, i) - x(j, i) - 0.5 * h_ * (v(j, i) + v(jp, i));
      R[N_ * n + j * n + i] = y(jp, i) - y(j, i) - 0.5 * h_ * (Fv(j, i) + Fv(jp, i));
    }
  }
  return R;
}

Vec PeriodicCollocation::residual(const Mat& x, const Mat& y, double lambda) const {
  if (!x.allFinite() || !y.allFinite())
    throw EvaluationError("PeriodicCollocation::residual: non-finite state");
  Mat v, Fv;
  node_caches(x, y, lambda, v, Fv);
  return residual_from_caches(x, v, y, Fv);
}

Mat PeriodicCollocation::jacobian_fd(const Mat& x, const Mat& y, double lambda, const Mat& v,
                                     const Mat& Fv) const {
  // Dense finite-difference Jacobian. Perturbing one nodal component changes
  // only that node's phi^{-1} and field values, so each column is the exact
  // forward difference of the residual with all provably unchanged rows
  // left at zero.
  const int n = problem_.n;
  const int dim = 2 * n * N_;
  Mat J = Mat::Zero(dim, dim);
  const double half_h = 0.5 * h_;

  for (int j = 0; j < N_; ++j) {
    const int jm = (j - 1 + N_) % N_;
    const double tj = h_ * j;
    const Vec xj = x.row(j);
    const Vec yj = y.row(j);
    const Vec vj = v.row(j);
    const Vec Fj = Fv.row(j);

    for (int i = 0; i < n; ++i) {
      // column for x_j[i]
      {
        const double step = kSqrtEps * (1.0 + std::abs(x(j, i)));
        Vec xp = xj;
        xp[i] += step;
        const Vec dF = (problem_.eval(tj, xp, vj, lambda) - Fj) / step;
        const int col = j * n + i;
        // R1_{j-1} gains x_j, R1_j loses it (and FD of the linear part is exact)
        J(jm * n + i, col) += 1.0;
        J(j * n + i, col) -= 1.0;
        for (int l = 0; l < n; ++l) {
          J(N_ * n + jm * n + l, col) -= half_h * dF[l];
          J(N_ * n + j * n + l, col) -= half_h * dF[l];
        }
      }
      // column for y_j[i]
      {
        const double step = kSqrtEps * (1.0 + std::abs(y(j, i)));
        Vec yp = yj;
        yp[i] += step;
        const Vec vp = phi_.invert(yp);
        const Vec dv = (vp - vj) / step;
        const Vec dF = (problem_.eval(tj, xj, vp, lambda) - Fj) / step;
        const int col = N_ * n + j * n + i;
        J(N_ * n + jm * n + i, col) += 1.0;
        J(N_ * n + j * n + i, col) -= 1.0;
        for (int l = 0; l < n; ++l) {
          J(jm * n + l, col) -= half_h * dv[l];
          J(j * n + l, col) -= half_h * dv[l];
          J(N_ * n + jm * n + l, col) -= half_h * dF[l];
          J(N_ * n + j * n + l, col) -= half_h * dF[l];
        }
      }
    }
  }
  return J;
}

NewtonResult PeriodicCollocation::newton(const Mat& x0, const Mat& y0, double lambda,
                                         const SolverOptions& opt) const {
  const int n = problem_.n;
  NewtonResult out;
  Mat x = x0, y = y0;
  Mat v, Fv;
  node_caches(x, y, lambda, v, Fv);
  Vec R = residual_from_caches(x, v, y, Fv);
  double rnorm = max_norm(R);

  for (int it = 0; it < opt.max_iter; ++it) {
    if (rnorm <= opt.newton_tol) {
      out.converged = true;
      break;
    }
    const Mat J = jacobian_fd(x, y, lambda, v, Fv);
    Eigen::PartialPivLU<Mat> lu(J);
    out.diagnostics.rcond = lu.rcond();
    const Vec step = lu.solve(-R);
    if (!step.allFinite()) {
      out.diagnostics.failure = "singular Jacobian (non-finite Newton step)";
      break;
    }

    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      Mat xt = x, yt = y;
      for (int j = 0; j < N_; ++j)
        for (int i = 0; i < n; ++i) {
          xt(j, i) += alpha * step[j * n + i];
          yt(j, i) += alpha * step[N_ * n + j * n + i];
        }
      Mat vt, Ft;
      bool eval_ok = true;
      Vec Rt;
      try {
        node_caches(xt, yt, lambda, vt, Ft);
        Rt = residual_from_caches(xt, vt, yt, Ft);
      } catch (const std::runtime_error&) {
        eval_ok = false;
      }
      if (eval_ok && Rt.allFinite() && max_norm(Rt) < rnorm) {
        x.swap(xt);
        y.swap(yt);
        v.swap(vt);
        Fv.swap(Ft);
        R.swap(Rt);
        rnorm = max_norm(R);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++out.diagnostics.iterations;
    if (!accepted) {
      out.diagnostics.failure = "backtracking failed to reduce the residual";
      break;
    }
  }

  out.diagnostics.final_residual = rnorm;
  if (!out.converged && rnorm <= opt.newton_tol) out.converged = true;
  if (!out.converged && out.diagnostics.failure.empty())
    out.diagnostics.failure = "iteration budget exhausted";
  if (out.converged) {
    out.solution.N = N_;
    out.solution.n = n;
    out.solution.T = problem_.T;
    out.solution.h = h_;
    out.solution.lambda = lambda;
    out.solution.residual_norm = rnorm;
    out.solution.x = x;
    out.solution.y = y;
  }
  return out;
}

Vec PeriodicCollocation::find_equilibrium(const Vec& guess, double tol, int max_iter) const {
  const int n = problem_.n;
  const Vec zero = Vec::Zero(n);
  auto g = [&](const Vec& x) { return problem_.eval(0.0, x, zero, 0.0); };
  Vec x = guess;
  Vec gx = g(x);
  for (int it = 0; it < max_iter; ++it) {
    if (gx.norm() <= tol) return x;
    Mat J(n, n);
    for (int i = 0; i < n; ++i) {
      const double step = kSqrtEps * (1.0 + std::abs(x[i]));
      Vec xp = x;
      xp[i] += step;
      J.col(i) = (g(xp) - gx) / step;
    }
    Vec dx = J.partialPivLu().solve(-gx);
    if (!dx.allFinite()) break;
    double alpha = 1.0;
    bool ok = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Vec xt = x + alpha * dx;
      const Vec gt = g(xt);
      if (gt.allFinite() && gt.norm() < gx.norm()) {
        x = xt;
        gx = gt;
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) break;
  }
  if (gx.norm() > tol)
    throw InputError("find_equilibrium: no root of the autonomous field found");
  return x;
}

ContinuationResult PeriodicCollocation::continue_to_target(
    const std::vector<double>& schedule, const SolverOptions& opt,
    const Vec& equilibrium_guess, double min_step) const {
  ContinuationResult out;
  if (schedule.empty() || schedule.front() != 0.0)
    throw InputError("continue_to_target: schedule must start at lambda = 0");
  for (std::size_t k = 0; k + 1 < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k + 1]))
      throw InputError("continue_to_target: schedule must be increasing");

  const Vec xstar = find_equilibrium(equilibrium_guess);
  Mat x0 = xstar.transpose().replicate(N_, 1);
  Mat y0 = Mat::Zero(N_, problem_.n);

  NewtonResult first = newton(x0, y0, 0.0, opt);
  if (!first.converged) {
    out.detail = "autonomous solve failed: " + first.diagnostics.failure;
    return out;
  }
  DiscreteSolution current = first.solution;
  out.trace.push_back(current);
  out.last_good_lambda = 0.0;

  std::deque<double> targets(schedule.begin() + 1, schedule.end());
  while (!targets.empty()) {
    const double target = targets.front();
    targets.pop_front();
    NewtonResult attempt = newton(current.x, current.y, target, opt);
    if (attempt.converged) {
      current = attempt.solution;
      out.trace.push_back(current);
      out.last_good_lambda = target;
      continue;
    }
    const double gap = target - out.last_good_lambda;
    if (gap <= min_step) {
      out.status = ContinuationResult::Status::Stalled;
      out.detail = "step to lambda = " + std::to_string(target) +
                   " failed at minimum step (" + attempt.diagnostics.failure +
                   ", residual " + std::to_string(attempt.diagnostics.final_residual) + ")";
      return out;
    }
    targets.push_front(target);
    targets.push_front(out.last_good_lambda + 0.5 * gap);
  }

  out.status = ContinuationResult::Status::Converged;
  out.solution = current;
  return out;
}

ConclusionReport verify_conclusion(const DiscreteSolution& sol, const BoundSet& set,
                                   double K, const PhiMap& phi, double containment_tol) {
  ConclusionReport rep;
  rep.nagumo_bound = K;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_speed = 0.0;
  for (int j = 0; j < sol.N; ++j) {
    min_margin = std::min(min_margin, membership_margin(set, sol.x.row(j)));
    max_speed = std::max(max_speed, phi.invert(sol.y.row(j)).norm());
  }
  rep.containment_margin = min_margin;
  rep.contained = min_margin >= -containment_tol;
  rep.max_speed = max_speed;
  rep.derivative_margin = K - max_speed;
  rep.derivative_bounded = max_speed <= K + containment_tol;
  return rep;
}

SelfConvergenceResult self_convergence(const HomotopyFamily& problem, const PhiMap& phi,
                                       const DiscreteSolution& sol,
                                       const SolverOptions& opt, int factor) {
  if (factor < 2) throw InputError("self_convergence: factor must be >= 2");
  const int Nf = sol.N * factor;
  PeriodicCollocation fine(problem, phi, Nf);

  // linear interpolation of the accepted solution onto the finer mesh
  Mat xf(Nf, sol.n), yf(Nf, sol.n);
  for (int j = 0; j < Nf; ++j) {
    const double tau = static_cast<double>(j) / factor;
    const int j0 = static_cast<int>(std::floor(tau)) % sol.N;
    const int j1 = (j0 + 1) % sol.N;
    const double w = tau - std::floor(tau);
    xf.row(j) = (1.0 - w) * sol.x.row(j0) + w * sol.x.row(j1);
    yf.row(j) = (1.0 - w) * sol.y.row(j0) + w * sol.y.row(j1);
  }
  NewtonResult refined = fine.newton(xf, yf, sol.lambda, opt);
  if (!refined.converged)
    throw EvaluationError("self_convergence: refined solve failed (" +
                          refined.diagnostics.failure + ")");
  double disc = 0.0;
  for (int j = 0; j < sol.N; ++j)
    disc = std::max(disc,
                    (refined.solution.x.row(j * factor) - sol.x.row(j)).norm());
  SelfConvergenceResult out;
  out.discrepancy = disc;
  out.refined = refined.solution;
  return out;
}

}  // namespace phibvp
