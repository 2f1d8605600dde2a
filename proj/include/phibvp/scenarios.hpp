#pragma once

#include "phibvp/apriori.hpp"
#include "phibvp/bounding.hpp"
#include "phibvp/bvp_solver.hpp"
#include "phibvp/convexity.hpp"
#include "phibvp/degree.hpp"
#include "phibvp/homotopy.hpp"
#include "phibvp/phi_map.hpp"
#include "phibvp/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phibvp {

// Prebuilt problem instances: each scenario bundles the target field, the
// homotopy family its existence proof prescribes, the bound set, the Nagumo
// bound recipe, the constants appearing in the proof chain and the expected
// verdict matrix (reproduced by the checkers at default grids).

using FrictionPotential = ScalarField;

enum class ScenarioKind { PeriodicSolve, FieldOnly, BlowUp };

struct NagumoRecipe {
  double K_phi = 0.0;    // bound on ||phi(x')||_inf from the K(M0, M1) bound
  double K_deriv = 0.0;  // implied bound on ||x'||_inf
  double M0 = 0.0;
  double M1 = 0.0;
  double p = 2.0;
  std::string description;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::PeriodicSolve;
  int n = 0;
  double T = 1.0;
  PhiMap phi;
  HomotopyFamily family;
  VectorField field;  // the frictionless part f or h used by the checkers
  BoundSet bound_set;
  Vec interior_point;
  std::optional<BoundingFn> bounding_fn;  // present for ball/sublevel sets
  std::optional<NagumoRecipe> nagumo;
  std::map<std::string, Verdict> expected;
  std::map<std::string, double> constants;
  std::vector<std::string> warnings;

  std::optional<LienardParams> lienard_params;
  std::vector<Vec> villari_points;
  std::optional<BlowUpSpec> blowup;
  std::function<Vec(const Vec&)> g_velocity;  // Rayleigh only
  FrictionPotential friction;                 // Rayleigh / Lienard
  std::function<Vec(double)> forcing;         // p(t), may be empty
  std::function<Vec(double)> forcing_P;       // zero-mean antiderivative

  bool solvable() const { return kind == ScenarioKind::PeriodicSolve; }
};

/// f(t, x) = x - c(t) on the ball B(0, R) with phi = phi_p and the homotopy
/// lambda f + (1 - lambda) x. Emits a warning when the Hartman margin
/// R^2 - R max||c|| is not positive.
Scenario build_hartman_knobloch(int n, double p, double R,
                                std::function<Vec(double)> c, double T = 1.0);

/// Rectangle bound set with axis outer normals and the homotopy
/// lambda f + (1 - lambda)(x - center).
Scenario build_poincare_miranda(const BoxSet& box,
                                std::function<Vec(double, const Vec&)> f,
                                const PhiMap& phi, double T = 1.0);

/// (phi(x'))' = g(x') + h(t, x) with the homotopy
/// g(y) + lambda h + (1 - lambda) V'. Throws BuildError when the structure
/// checks (parallelism of g, boundedness of g - grad G o phi) fail.
Scenario build_rayleigh(std::function<Vec(const Vec&)> g, FrictionPotential G,
                        std::function<Vec(double, const Vec&)> h, BoundingFn V,
                        const PhiMap& phi, double T = 1.0);

enum class LienardVariant { Thm0, I, II, III };

struct LienardBuildParams {
  double R = 1.0;                    // (H_H) radius, Thm0 variant
  double d = 1.0;                    // componentwise threshold, variant (iii)
  std::vector<double> rho_list{1.0};
  std::optional<double> eta;         // coercivity level; chosen automatically if absent
  std::optional<LienardParams> sampling;  // overrides the default sample plan
};

/// (phi(x'))' = d/dt grad G(x) + h(t, x) + p(t) with the homotopy
/// lambda (Hess G(x) x' + h + p) + (1 - lambda) x. The forcing must have zero
/// mean (checked by quadrature); P is its zero-mean antiderivative, built by
/// cumulative quadrature when not supplied. The proof constants K1 and R* are
/// attached for the post-solve check.
Scenario build_lienard(FrictionPotential G, VectorField h,
                       std::function<Vec(double)> p_forcing,
                       std::function<Vec(double)> P_antiderivative,
                       LienardVariant variant, const LienardBuildParams& params,
                       const PhiMap& phi, double T = 1.0);

/// The three planar sign-condition fields built around q(x) = x e^{-|x|},
/// with the expected verdict matrix (exactly one of (i)/(ii)/(iii) per k).
Scenario build_remark33_example(int k, double eps = 0.1);

/// Blow-up spec; BuildError when the integrability hypothesis fails.
BlowUpSpec build_blowup(double gamma, const PhiMap& scalar_phi);
Scenario make_blowup_scenario(double gamma, const PhiMap& scalar_phi);

// ---------------------------------------------------------------------------
// Verification orchestration: runs every checker named in the scenario's
// expected-verdict matrix at the requested grids.
// ---------------------------------------------------------------------------

struct VerifyOptions {
  int time_nodes = 64;
  int boundary_dirs = 256;  // 1024 for n = 3
  int sphere_dirs = 256;
  int face_samples = 16;
  int tangent_dirs = 8;
  int villari_quad = 256;
  double root_tol = 1e-10;
  double cond_tol = 1e-9;
  double grad_tol = 1e-8;
  std::uint64_t seed = 1;
  std::optional<double> y_cap;  // overrides the Nagumo cap in (H_V)

  static VerifyOptions defaults(int n);
};

struct ScenarioVerification {
  std::vector<HypothesisReport> reports;
  std::optional<DegreeCertificate> degree;
  std::optional<ConvexityVerdict> convexity;
  std::optional<IntegrabilityResult> integrability;
  std::map<std::string, Verdict> expected;

  const HypothesisReport* find(const std::string& id) const;
  bool any_expected_hold_violated() const;
  bool any_expected_hold_inconclusive() const;
  bool matrix_matches() const;  // every expected verdict reproduced exactly
};

ScenarioVerification verify_scenario(const Scenario& scenario, const VerifyOptions& opt);

}  // namespace phibvp
