#pragma once

#include "phibvp/bounding.hpp"
#include "phibvp/phi_map.hpp"
#include "phibvp/types.hpp"

#include <functional>
#include <vector>

namespace phibvp {

// A-priori derivative bounds for the periodic problem: the K(M0, M1) bound
// for families of periodic functions, Nagumo-Hartman growth checks, and the
// blow-up construction showing that no universal growth condition fits every
// homeomorphism phi.

struct AprioriBound {
  double M0 = 0.0;
  double M1 = 0.0;
  double p = 2.0;  // may be +infinity
  double T = 1.0;
  double K = 0.0;
};

/// K = M0 + T^((p-1)/p) M1, with the exponent read as 0 at p = 1 and 1 at
/// p = +infinity.
double lemma21_bound(double M0, double M1, double p, double T);

AprioriBound make_apriori_bound(double M0, double M1, double p, double T);

/// A T-periodic trajectory sampled on the uniform grid t_j = j T / N
/// (wrap-around; the node at T is not stored). Rows are nodes.
struct SampledTrajectory {
  double T = 1.0;
  Mat z;   // N x n values
  Mat dz;  // N x n derivative values
};

/// Empirically verifies the two bound hypotheses on each trajectory --
/// min_t |<z(t), omega>| <= M0 over the supplied directions, and the discrete
/// L^p norm of z' <= M1 -- then asserts ||z||_inf <= K(M0, M1). A hypothesis
/// failure makes the report inconclusive ("inapplicable") with a witness.
HypothesisReport verify_family_bound(const std::vector<SampledTrajectory>& family,
                                     double M0, double p, double M1, double T,
                                     const std::vector<Vec>& omegas);

/// Discrete L^p norm of the nodal derivative values by periodic trapezoid
/// (the maximum for p = +infinity).
double discrete_lp_norm(const Mat& dz, double T, double p);

struct NagumoGrowthSpec {
  std::function<double(double)> eta;  // (NH1) envelope, positive
  double alpha = 0.0;                 // (NH2) constants
  double beta = 0.0;
  double R = 1.0;
};

struct Nh1Result {
  HypothesisReport report;               // the envelope inequality at samples
  bool integral_divergent = false;       // trend flag for int s/eta(s) ds
  std::vector<double> partial_integrals; // at decade checkpoints
};

/// (NH1): ||f(t,x,y)|| <= eta(||y||) at samples plus the divergence trend of
/// the partial integrals of s/eta(s) at geometrically growing upper limits.
Nh1Result check_nh1(const VectorField& f, const std::function<double(double)>& eta,
                    double R, const std::vector<double>& t_samples,
                    const std::vector<Vec>& x_samples, const std::vector<Vec>& y_samples,
                    double Xi_max = 1e6);

Nh1Result check_nh1(const VectorField& f, const NagumoGrowthSpec& spec,
                    const std::vector<double>& t_samples,
                    const std::vector<Vec>& x_samples, const std::vector<Vec>& y_samples,
                    double Xi_max = 1e6);

/// (NH2): ||f(t,x,y)|| <= 2 alpha (<x, f(t,x,y)> + ||y||^2) + beta at samples
/// (meaningful for n > 1).
HypothesisReport check_nh2(const VectorField& f, double alpha, double beta, double R,
                           const std::vector<double>& t_samples,
                           const std::vector<Vec>& x_samples,
                           const std::vector<Vec>& y_samples);

HypothesisReport check_nh2(const VectorField& f, const NagumoGrowthSpec& spec,
                           const std::vector<double>& t_samples,
                           const std::vector<Vec>& x_samples,
                           const std::vector<Vec>& y_samples);

// ---------------------------------------------------------------------------
// The blow-up construction: x'(t) = phi^{-1}((1-t)^{-gamma}) on [0, 1), whose
// primitive stays bounded whenever int_1^inf phi^{-1}(xi) xi^{-(1+gamma)/gamma}
// dxi converges, while x' and phi(x') blow up at t = 1.
// ---------------------------------------------------------------------------
struct BlowUpSpec {
  PhiMap phi;        // scalar (n = 1)
  double gamma = 0.5;
  double quad_tol = 1e-10;
};

/// (x(t), x'(t)) for 0 <= t < 1; DomainError beyond. The quadrature splits
/// [0, t] dyadically toward the singular endpoint before going adaptive.
std::pair<double, double> blowup_solution(const BlowUpSpec& spec, double t);

struct IntegrabilityResult {
  bool convergent = false;
  std::vector<double> partials;  // at decade checkpoints
  double last_ratio = 0.0;       // final successive decade-contribution ratio
};

/// Convergence heuristic for the blow-up integrability hypothesis: successive
/// decade contributions must decay geometrically (ratio <= 1/2).
IntegrabilityResult check_blowup_integrability(const PhiMap& scalar_phi, double gamma,
                                               double Xi_max = 1e8);

}  // namespace phibvp
