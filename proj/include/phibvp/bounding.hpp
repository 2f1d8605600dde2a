#pragma once

#include "phibvp/homotopy.hpp"
#include "phibvp/phi_map.hpp"
#include "phibvp/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace phibvp {

// ---------------------------------------------------------------------------
// Scalar fields with derivative access. Analytic callbacks are used when
// supplied; otherwise central finite differences with step
// eps^(1/3) (1 + ||x||) for gradients and eps^(1/4) (1 + ||x||) for Hessians.
// Hessians are always symmetrized.
// ---------------------------------------------------------------------------
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  ScalarField() = default;
  explicit ScalarField(ValueFn value) : value_(std::move(value)) {}
  ScalarField(ValueFn value, GradFn grad) : value_(std::move(value)), grad_(std::move(grad)) {}
  ScalarField(ValueFn value, GradFn grad, HessFn hess)
      : value_(std::move(value)), grad_(std::move(grad)), hess_(std::move(hess)) {}

  double operator()(const Vec& x) const { return value_(x); }
  Vec grad(const Vec& x) const;
  Mat hess(const Vec& x) const;

  bool has_analytic_grad() const { return static_cast<bool>(grad_); }
  bool has_analytic_hess() const { return static_cast<bool>(hess_); }

  /// Central-difference gradient regardless of an analytic callback (used to
  /// cross-check supplied gradients).
  Vec grad_fd(const Vec& x) const;
  Mat hess_fd(const Vec& x) const;

 private:
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

// ---------------------------------------------------------------------------
// A bounding function V with a level c. The closed sublevel set D = [V <= c]
// plays the role of the candidate bound set, G = [V < c] its interior and
// [V = c] the boundary where every hypothesis is tested.
// ---------------------------------------------------------------------------
class BoundingFn : public ScalarField {
 public:
  BoundingFn() = default;
  BoundingFn(ScalarField field, double level)
      : ScalarField(std::move(field)), level_(level) {}

  double level() const { return level_; }

  /// V(x) = (||x||^2 - R^2)/2 at level 0; the sphere of radius R.
  static BoundingFn sphere(int n, double R);

  /// V(x) = x^T Q x / 2 with symmetric positive definite Q, at the given level.
  static BoundingFn quadratic_form(const Mat& Q, double level);

  /// V(x1, x2) = a x1^4/4 - b x1^2 + x2^2: a two-lobed "peanut" profile used
  /// as the standard nonconvex instance (waist at the origin).
  static BoundingFn peanut(double a, double b, double level);

 private:
  double level_ = 0.0;
};

// ---------------------------------------------------------------------------
// Continuous vector fields, optionally velocity-dependent.
// ---------------------------------------------------------------------------
struct VectorField {
  int n = 0;
  double T = 1.0;
  bool depends_on_y = false;
  std::function<Vec(double t, const Vec& x)> f_tx;
  std::function<Vec(double t, const Vec& x, const Vec& y)> f_txy;

  static VectorField autonomous(int n, double T, std::function<Vec(const Vec&)> f);
  static VectorField time_dependent(int n, double T,
                                    std::function<Vec(double, const Vec&)> f);
  static VectorField velocity_dependent(
      int n, double T, std::function<Vec(double, const Vec&, const Vec&)> f);

  Vec eval(double t, const Vec& x) const;
  Vec eval(double t, const Vec& x, const Vec& y) const;
};

// ---------------------------------------------------------------------------
// Bound-set geometry descriptors used by the solver's conclusion check.
// ---------------------------------------------------------------------------
struct BallSet {
  Vec center;
  double R = 1.0;
};
struct BoxSet {
  Vec lo, hi;
};
struct SublevelSet {
  BoundingFn V;
};
using BoundSet = std::variant<BallSet, BoxSet, SublevelSet>;

/// Nonnegative inside the set, negative outside (distance-like for balls and
/// boxes, level slack c - V(x) for sublevel sets).
double membership_margin(const BoundSet& set, const Vec& x);

// ---------------------------------------------------------------------------
// Boundary sampling and the pointwise hypothesis checkers. Verdicts follow
// the sampled-verdict convention of HypothesisReport; ties at zero satisfy
// ">= 0" conditions and violate strict "> 0" conditions.
// ---------------------------------------------------------------------------

struct BoundarySample {
  std::vector<Vec> points;
  int requested = 0;
  int skipped = 0;  // rays with no sign change within the march budget
  Vec interior;     // the star center P0 used
};

/// Finds [V = c] along quasi-uniform rays from an interior point P0 with
/// V(P0) < c: marches to the first sign change, then bisects until
/// |V(u) - c| <= root_tol. Throws BoundarySamplingError when fewer than half
/// the requested directions produce a point.
BoundarySample sample_boundary(const BoundingFn& V, const Vec& P0, int n_dirs,
                               double root_tol, double march_max = 1e3,
                               std::uint64_t seed = 0x5eed5eedULL);

/// Verifies V'(u) != 0 (norm >= tol) on the sampled boundary.
HypothesisReport check_grad_nonvanishing(const BoundingFn& V,
                                         const std::vector<Vec>& boundary, double tol);

/// Orthonormal completion of g/||g||: returns an n x (n-1) matrix whose
/// columns span the tangent hyperplane {y : <g, y> = 0}.
Mat tangent_basis(const Vec& g);

struct ConditionCResult {
  double min_tangent_eig = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Smallest eigenvalue of the Hessian of V restricted to the tangent plane of
/// the level set at u; holds iff it is >= -tol.
ConditionCResult check_condition_C(const BoundingFn& V, const Vec& u, double tol);

struct HVOptions {
  std::vector<double> t_grid;
  std::vector<double> lambda_grid;  // inside [0, 1)
  std::vector<double> tangent_radii;
  int tangent_dirs = 8;
  double strict_margin = 1e-9;
  static HVOptions defaults(double T, double y_max);
};

/// The bounding-function non-tangency inequality
///   <V''(u) y, phi(y)> + <V'(u), F(t, u, y; lambda)> > 0
/// over sampled boundary points, times, homotopy parameters and tangent
/// velocities y with ||y|| up to the Nagumo cap.
HypothesisReport check_HV(const BoundingFn& V, const HomotopyFamily& family,
                          const PhiMap& phi, const std::vector<Vec>& boundary,
                          const HVOptions& opt);

/// Hartman's condition <f(t, x), x> >= 0 on the sphere ||x|| = R.
HypothesisReport check_hartman(const VectorField& f, double R,
                               const std::vector<double>& t_grid, int sphere_dirs);

/// Poincare-Miranda sign conditions on the faces of a rectangle.
HypothesisReport check_poincare_miranda(const VectorField& f, const BoxSet& box,
                                        const std::vector<double>& t_grid,
                                        int face_samples, std::uint64_t seed = 0x5eed5eedULL);

/// <f(t, u), nu_u> >= 0 for a supplied field of outer normals. Also verifies
/// the supporting-hyperplane sanity check <u - P, nu_u> > 0 against the
/// interior point P and throws NotOuterNormalError when it fails.
HypothesisReport check_outer_normal(const VectorField& f,
                                    const std::vector<std::pair<Vec, Vec>>& normals,
                                    const std::vector<double>& t_grid, const Vec& P);

struct LienardParams {
  double R = 1.0;          // (H_H) threshold radius
  double d = 1.0;          // componentwise threshold for condition (iii)
  double i_threshold = 1.0;  // sphere-minimum level condition (i) must exceed
  std::vector<double> rho_list{1.0};
  std::vector<double> radii;       // sphere radii; filled by defaults() if empty
  std::vector<Vec> directions;     // unit directions; filled by defaults() if empty
  std::vector<Vec> y_offsets_unit; // unit offsets scaled by rho in (ii)
  std::vector<double> t_grid{0.0};
  // extra (x, y) samples beyond the radial plan; the x parts also feed the
  // pointwise checks, the pairs feed (ii) at radius ||x||
  std::vector<std::pair<Vec, Vec>> probes;
  static LienardParams defaults(int n, double R, double d);
};

/// Sign-condition battery for the Lienard results: keys "H_H", "H_H_plus",
/// "lienard_i", "lienard_ii", "lienard_iii". "H_H_plus" reports the
/// empirical K0 = max(0, -min <h, x>) in its margin (negated).
std::map<std::string, HypothesisReport> check_lienard_conditions(
    const VectorField& h, const LienardParams& params);

/// Generalized Villari condition along constant trial paths: some component
/// of the time average of h must be bounded away from zero on every path
/// whose offset has a component beyond d.
HypothesisReport check_villari(const VectorField& h, double d, double T,
                               const std::vector<Vec>& trial_points, int quad_N,
                               double tol = 1e-9);

struct RayleighStructure {
  HypothesisReport parallel;  // g(y) is parallel to y at every sample
  HypothesisReport bounded;   // g(y) - grad G(phi(y)) bounded (trend flag)
  double L = 0.0;             // empirical bound of the difference
};

/// Structure checks for the Rayleigh velocity field g against the friction
/// potential G: parallelism of g(y) to y, and boundedness of
/// g(y) - grad G(phi(y)) over the sampled velocities.
RayleighStructure check_rayleigh_structure(const std::function<Vec(const Vec&)>& g,
                                           const ScalarField& G, const PhiMap& phi,
                                           const std::vector<Vec>& y_samples,
                                           double parallel_tol = 1e-9);

}  // namespace phibvp
