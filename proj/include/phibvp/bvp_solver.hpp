#pragma once

#include "phibvp/bounding.hpp"
#include "phibvp/homotopy.hpp"
#include "phibvp/phi_map.hpp"
#include "phibvp/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace phibvp {

// ---------------------------------------------------------------------------
// Trapezoidal collocation of the first-order system
//   x' = phi^{-1}(y),   y' = F(t, x, phi^{-1}(y); lambda)
// on the uniform periodic mesh t_j = j T / N. Periodicity is structural: all
// node indices wrap mod N, so the discrete boundary conditions are exact by
// construction and the wrap rows j = N-1 carry the closure equations.
// ---------------------------------------------------------------------------

struct DiscreteSolution {
  int N = 0;
  int n = 0;
  double T = 1.0;
  double h = 0.0;
  double lambda = 0.0;
  double residual_norm = 0.0;
  Mat x;  // N x n nodal values
  Mat y;  // N x n nodal values of phi(x')

  double t(int j) const { return h * j; }
};

struct SolverOptions {
  double newton_tol = 1e-10;  // absolute, residual max-norm
  int max_iter = 50;
  int max_backtracks = 30;
};

struct NewtonDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;
  double rcond = 0.0;  // reciprocal condition estimate of the last Jacobian
  std::string failure;
};

struct NewtonResult {
  bool converged = false;
  DiscreteSolution solution;
  NewtonDiagnostics diagnostics;
};

struct ContinuationResult {
  enum class Status { Converged, Stalled };
  Status status = Status::Stalled;
  std::optional<DiscreteSolution> solution;  // at lambda = 1 when converged
  std::vector<DiscreteSolution> trace;       // every accepted lambda step
  double last_good_lambda = 0.0;
  std::string detail;

  bool converged() const { return status == Status::Converged; }
};

class PeriodicCollocation {
 public:
  PeriodicCollocation(HomotopyFamily problem, PhiMap phi, int N);

  int mesh_size() const { return N_; }
  const HomotopyFamily& problem() const { return problem_; }
  const PhiMap& phi() const { return phi_; }

  /// Collocation residual, 2 n N entries: the x' rows first, then the y'
  /// rows, node-major inside each block.
  Vec residual(const Mat& x, const Mat& y, double lambda) const;

  /// Damped Newton with a dense finite-difference Jacobian (column step
  /// sqrt(eps) (1 + |component|)); backtracking halves the step while the
  /// residual max-norm fails to decrease.
  NewtonResult newton(const Mat& x0, const Mat& y0, double lambda,
                      const SolverOptions& opt) const;

  /// Walks the increasing lambda schedule from the autonomous problem,
  /// reusing each accepted solution as the next initial guess and bisecting
  /// the lambda step on failure down to min_step. The starting state is the
  /// constant equilibrium of F(0, ., 0, 0) (root-found from
  /// equilibrium_guess).
  ContinuationResult continue_to_target(const std::vector<double>& schedule,
                                        const SolverOptions& opt,
                                        const Vec& equilibrium_guess,
                                        double min_step = 1e-3) const;

  /// Root of x -> F(0, x, 0, 0) by damped Newton on R^n.
  Vec find_equilibrium(const Vec& guess, double tol = 1e-12, int max_iter = 100) const;

 private:
  HomotopyFamily problem_;
  PhiMap phi_;
  int N_ = 0;
  double h_ = 0.0;

  void node_caches(const Mat& x, const Mat& y, double lambda, Mat& v, Mat& Fv) const;
  Vec residual_from_caches(const Mat& x, const Mat& v, const Mat& y, const Mat& Fv) const;
  Mat jacobian_fd(const Mat& x, const Mat& y, double lambda, const Mat& v,
                  const Mat& Fv) const;
};

struct ConclusionReport {
  bool contained = false;
  double containment_margin = 0.0;  // min membership margin over nodes
  bool derivative_bounded = false;
  double derivative_margin = 0.0;  // K - max ||phi^{-1}(y_j)||
  double max_speed = 0.0;
  double nagumo_bound = 0.0;
};

/// Checks the continuation conclusion: every node inside the bound set (up to
/// containment_tol) and every nodal velocity below the Nagumo bound K.
ConclusionReport verify_conclusion(const DiscreteSolution& sol, const BoundSet& set,
                                   double K, const PhiMap& phi,
                                   double containment_tol = 1e-8);

struct SelfConvergenceResult {
  double discrepancy = 0.0;  // max nodal difference against the refined solve
  DiscreteSolution refined;
};

/// Re-solves at mesh factor * N seeded by linear interpolation of the
/// accepted solution and reports the maximum nodal discrepancy.
SelfConvergenceResult self_convergence(const HomotopyFamily& problem, const PhiMap& phi,
                                       const DiscreteSolution& sol,
                                       const SolverOptions& opt, int factor = 2);

}  // namespace phibvp
