#include "phibvp/scenarios.hpp"

#include "phibvp/quadrature.hpp"
#include "phibvp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace phibvp {

namespace {

std::vector<double> time_grid(double T, int nodes) {
  std::vector<double> g(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) g[static_cast<std::size_t>(j)] = T * j / nodes;
  return g;
}

double max_forcing_norm(const std::function<Vec(double)>& c, double T, int nodes = 512) {
  double m = 0.0;
  for (int j = 0; j <= nodes; ++j) m = std::max(m, c(T * j / nodes).norm());
  return m;
}

double forcing_l1_norm(const std::function<Vec(double)>& c, double T, int nodes = 2048) {
  return trapezoid([&](double t) { return c(t).norm(); }, 0.0, T, nodes);
}

double spectral_norm(const Mat& H) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (H + H.transpose()));
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// zero-mean antiderivative by cumulative trapezoid on a fine grid with
// linear interpolation (periodic extension)
std::function<Vec(double)> numeric_antiderivative(const std::function<Vec(double)>& p,
                                                  double T, int n, int grid = 4096) {
  auto values = std::make_shared<std::vector<Vec>>();
  values->reserve(static_cast<std::size_t>(grid + 1));
  Vec acc = Vec::Zero(n);
  values->push_back(acc);
  const double h = T / grid;
  Vec prev = p(0.0);
  for (int j = 1; j <= grid; ++j) {
    const Vec cur = p(h * j);
    acc += 0.5 * h * (prev + cur);
    values->push_back(acc);
    prev = cur;
  }
  Vec mean = Vec::Zero(n);
  for (int j = 0; j < grid; ++j) mean += (*values)[static_cast<std::size_t>(j)];
  mean /= grid;
  for (auto& v : *values) v -= mean;
  return [values, T, h, grid](double t) -> Vec {
    double tau = std::fmod(t, T);
    if (tau < 0.0) tau += T;
    const double pos = tau / h;
    int j = std::min(static_cast<int>(std::floor(pos)), grid - 1);
    const double w = pos - j;
    return (1.0 - w) * (*values)[static_cast<std::size_t>(j)] +
           w * (*values)[static_cast<std::size_t>(j + 1)];
  };
}

double sampled_M_eta(const PhiMap& phi, double eta) {
  if (phi.kind() == PhiMap::Kind::PLaplacian) return p_laplacian_M_eta(phi.p(), eta);
  const auto res = check_h_phi(phi, eta, geomspace(1e-3, 1e3, 40), 16);
  if (res.verdict == Verdict::Violated)
    throw BuildError("phi fails <phi(xi), xi> > 0; (H_phi) unusable");
  return res.M_eta;
}

}  // namespace

Scenario build_hartman_knobloch(int n, double p, double R, std::function<Vec(double)> c,
                                double T) {
  if (!(R > 0.0)) throw BuildError("build_hartman_knobloch: R must be positive");
  Scenario s;
  s.name = "hartman_knobloch";
  s.kind = ScenarioKind::PeriodicSolve;
  s.n = n;
  s.T = T;
  s.phi = PhiMap::p_laplacian(n, p);

  auto forcing = std::move(c);
  s.field = VectorField::time_dependent(
      n, T, [forcing](double t, const Vec& x) -> Vec { return x - forcing(t); });
  auto target = [forcing](double t, const Vec& x, const Vec&) -> Vec {
    return x - forcing(t);
  };
  auto autonomous = [](const Vec& x, const Vec&) -> Vec { return x; };
  s.family = HomotopyFamily::convex(n, T, target, autonomous);
  s.forcing = forcing;

  s.bound_set = BallSet{Vec::Zero(n), R};
  s.bounding_fn = BoundingFn::sphere(n, R);
  s.interior_point = Vec::Zero(n);

  const double max_c = max_forcing_norm(forcing, T);
  const double margin = R * R - R * max_c;
  if (margin <= 0.0)
    s.warnings.push_back("Hartman margin R^2 - R max||c|| = " + std::to_string(margin) +
                         " is not positive");
  const double R2 = R + max_c;
  NagumoRecipe recipe;
  recipe.M0 = 0.0;
  recipe.M1 = R2;
  recipe.p = std::numeric_limits<double>::infinity();
  recipe.K_phi = lemma21_bound(0.0, R2, recipe.p, T);
  recipe.K_deriv = s.phi.inverse_radius_bound(recipe.K_phi);
  recipe.description = "K = T R2 with R2 = R + max||c|| (p = inf)";
  s.nagumo = recipe;

  s.constants["R"] = R;
  s.constants["max_forcing"] = max_c;
  s.constants["hartman_margin_lb"] = margin;
  s.constants["R2"] = R2;
  s.constants["K_phi"] = recipe.K_phi;
  s.constants["K_deriv"] = recipe.K_deriv;
  // envelope constant for (NH1)/(NH2); headroom keeps the attained supremum
  // from tying at roundoff level
  s.constants["eta_const"] = R2 * (1.0 + 1e-9);

  s.expected["hartman"] = Verdict::HoldsAtSamples;
  s.expected["outer_normal"] = Verdict::HoldsAtSamples;
  s.expected["cond_Vprime"] = Verdict::HoldsAtSamples;
  s.expected["cond_C"] = Verdict::HoldsAtSamples;
  s.expected["H_V"] = Verdict::HoldsAtSamples;
  s.expected["degree"] = Verdict::HoldsAtSamples;
  s.expected["NH1"] = Verdict::HoldsAtSamples;
  if (n > 1) s.expected["NH2"] = Verdict::HoldsAtSamples;
  return s;
}

Scenario build_poincare_miranda(const BoxSet& box,
                                std::function<Vec(double, const Vec&)> f,
                                const PhiMap& phi, double T) {
  const int n = static_cast<int>(box.lo.size());
  for (int i = 0; i < n; ++i)
    if (!(box.lo[i] < box.hi[i])) throw BuildError("build_poincare_miranda: degenerate box");
  Scenario s;
  s.name = "poincare_miranda";
  s.kind = ScenarioKind::PeriodicSolve;
  s.n = n;
  s.T = T;
  s.phi = phi;
  s.field = VectorField::time_dependent(n, T, f);
  const Vec center = 0.5 * (box.lo + box.hi);
  auto target = [f](double t, const Vec& x, const Vec&) -> Vec { return f(t, x); };
  auto autonomous = [center](const Vec& x, const Vec&) -> Vec { return x - center; };
  s.family = HomotopyFamily::convex(n, T, target, autonomous);
  s.bound_set = box;
  s.interior_point = center;

  // the box sits inside the ball of the half-diagonal radius about its center
  const double half_diag = 0.5 * (box.hi - box.lo).norm();
  double max_f = 0.0;
  {
    const auto ts = time_grid(T, 64);
    auto pts = uniform_points_in_box(box.lo, box.hi, 512, 7);
    if (n <= 12) {
      for (int mask = 0; mask < (1 << n); ++mask) {
        Vec corner(n);
        for (int i = 0; i < n; ++i) corner[i] = (mask >> i) & 1 ? box.hi[i] : box.lo[i];
        pts.push_back(corner);
      }
    }
    for (const auto& x : pts)
      for (double t : ts) max_f = std::max(max_f, s.field.eval(t, x).norm());
  }
  const double R2 = std::max(max_f, half_diag) * (1.0 + 1e-9);
  NagumoRecipe recipe;
  recipe.M0 = 0.0;
  recipe.M1 = R2;
  recipe.p = std::numeric_limits<double>::infinity();
  recipe.K_phi = lemma21_bound(0.0, R2, recipe.p, T);
  recipe.K_deriv = s.phi.inverse_radius_bound(recipe.K_phi);
  recipe.description = "K = T R2 with R2 = max(max||f|| on the box, half-diagonal)";
  s.nagumo = recipe;
  s.constants["R2"] = R2;
  s.constants["K_phi"] = recipe.K_phi;
  s.constants["K_deriv"] = recipe.K_deriv;
  s.constants["eta_const"] = R2 * (1.0 + 1e-9);

  s.expected["poincare_miranda"] = Verdict::HoldsAtSamples;
  s.expected["outer_normal"] = Verdict::HoldsAtSamples;
  s.expected["degree"] = Verdict::HoldsAtSamples;
  s.expected["NH1"] = Verdict::HoldsAtSamples;
  if (n > 1) s.expected["NH2"] = Verdict::HoldsAtSamples;
  return s;
}

Scenario build_rayleigh(std::function<Vec(const Vec&)> g, FrictionPotential G,
                        std::function<Vec(double, const Vec&)> h, BoundingFn V,
                        const PhiMap& phi, double T) {
  const int n = phi.dimension();
  Scenario s;
  s.name = "rayleigh";
  s.kind = ScenarioKind::PeriodicSolve;
  s.n = n;
  s.T = T;
  s.phi = phi;
  s.field = VectorField::time_dependent(n, T, h);
  s.g_velocity = g;
  s.friction = G;
  s.bounding_fn = V;
  s.bound_set = SublevelSet{V};
  s.interior_point = Vec::Zero(n);
  if (!(V(s.interior_point) < V.level()))
    throw BuildError("build_rayleigh: origin is not interior to [V < c]");

  // structure checks at build samples
  std::vector<Vec> y_samples;
  y_samples.push_back(Vec::Zero(n));
  for (double r : geomspace(1e-2, 1e2, 13))
    for (const auto& d : unit_directions(n, 8)) y_samples.push_back(r * d);
  const auto structure = check_rayleigh_structure(g, G, phi, y_samples);
  if (!structure.parallel.holds())
    throw BuildError("build_rayleigh: g(y) is not parallel to y at build samples");
  if (!structure.bounded.holds())
    throw BuildError("build_rayleigh: g - grad G o phi shows unbounded growth");
  const double L = structure.L;

  auto target = [g, h](double t, const Vec& x, const Vec& y) -> Vec {
    return g(y) + h(t, x);
  };
  auto autonomous = [g, V](const Vec& x, const Vec& y) -> Vec {
    return g(y) + V.grad(x);
  };
  s.family = HomotopyFamily::convex(n, T, target, autonomous);

  // R0 bounds ||lambda h + (1 - lambda) V'|| over the closed sublevel set
  const auto boundary = sample_boundary(V, s.interior_point, 128, 1e-9);
  double R0 = 0.0;
  const auto ts = time_grid(T, 64);
  for (const auto& u : boundary.points) {
    for (double blend : {1.0, 0.5, 0.25}) {
      const Vec x = s.interior_point + blend * (u - s.interior_point);
      R0 = std::max(R0, V.grad(x).norm());
      for (double t : ts) R0 = std::max(R0, s.field.eval(t, x).norm());
    }
  }

  NagumoRecipe recipe;
  recipe.M0 = 0.0;
  recipe.M1 = (L + R0) * std::sqrt(T);
  recipe.p = 2.0;
  recipe.K_phi = lemma21_bound(0.0, recipe.M1, 2.0, T);
  recipe.K_deriv = s.phi.inverse_radius_bound(recipe.K_phi);
  recipe.description = "L2 bound of (phi(x'))' is (L + R0) sqrt(T); K via p = 2";
  s.nagumo = recipe;
  s.constants["L"] = L;
  s.constants["R0"] = R0;
  s.constants["K_phi"] = recipe.K_phi;
  s.constants["K_deriv"] = recipe.K_deriv;

  s.expected["rayleigh_parallel"] = Verdict::HoldsAtSamples;
  s.expected["rayleigh_bounded"] = Verdict::HoldsAtSamples;
  s.expected["cond_Vprime"] = Verdict::HoldsAtSamples;
  s.expected["cond_C"] = Verdict::HoldsAtSamples;
  s.expected["outer_normal"] = Verdict::HoldsAtSamples;
  s.expected["H_V"] = Verdict::HoldsAtSamples;
  s.expected["degree"] = Verdict::HoldsAtSamples;
  return s;
}

Scenario build_lienard(FrictionPotential G, VectorField h,
                       std::function<Vec(double)> p_forcing,
                       std::function<Vec(double)> P_antiderivative,
                       LienardVariant variant, const LienardBuildParams& params,
                       const PhiMap& phi, double T) {
  const int n = h.n;
  Scenario s;
  switch (variant) {
    case LienardVariant::Thm0: s.name = "lienard_0"; break;
    case LienardVariant::I: s.name = "lienard_i"; break;
    case LienardVariant::II: s.name = "lienard_ii"; break;
    case LienardVariant::III: s.name = "lienard_iii"; break;
  }
  s.kind = ScenarioKind::PeriodicSolve;
  s.n = n;
  s.T = T;
  s.phi = phi;
  s.field = h;
  s.friction = G;

  double P_inf = 0.0;
  double p_l1 = 0.0;
  if (p_forcing) {
    const Vec mean =
        average_field([&](double t, const Vec&) { return p_forcing(t); }, T,
                      Vec::Zero(n), 2048) ;
    if (mean.cwiseAbs().maxCoeff() > 1e-10)
      throw BuildError("build_lienard: forcing must have zero mean");
    s.forcing = p_forcing;
    s.forcing_P = P_antiderivative ? P_antiderivative
                                   : numeric_antiderivative(p_forcing, T, n);
    P_inf = max_forcing_norm(s.forcing_P, T);
    p_l1 = forcing_l1_norm(p_forcing, T);
  }

  auto plan = params.sampling ? *params.sampling
                              : LienardParams::defaults(n, params.R, params.d);
  plan.R = params.R;
  plan.d = params.d;
  plan.rho_list = params.rho_list;
  s.lienard_params = plan;

  const auto battery = check_lienard_conditions(h, plan);
  const double K0 = std::max(0.0, -battery.at("H_H_plus").margin);

  // coercivity level eta and the deficit cap M_eta
  double eta;
  if (params.eta) {
    eta = *params.eta;
    if (p_forcing && !(eta > P_inf))
      throw BuildError("build_lienard: eta must exceed ||P||_inf");
  } else if (!p_forcing || variant == LienardVariant::Thm0) {
    eta = 1.0;
  } else {
    // minimize (K0 + M_eta)/(eta - ||P||_inf) over a candidate grid
    eta = P_inf + 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (double inc : geomspace(1e-3 * (1.0 + P_inf), 10.0 * (1.0 + P_inf), 200)) {
      const double cand = P_inf + inc;
      const double value = (K0 + sampled_M_eta(phi, cand)) / (cand - P_inf);
      if (value < best) {
        best = value;
        eta = cand;
      }
    }
  }
  const double M_eta = sampled_M_eta(phi, eta);
  const double K1 = (p_forcing && variant != LienardVariant::Thm0)
                        ? T * (K0 + M_eta) / (eta - P_inf)
                        : T * (K0 + M_eta);

  // R* per the proof of the selected variant
  double R_star = 0.0;
  switch (variant) {
    case LienardVariant::Thm0:
      R_star = params.R + K1 * T;
      break;
    case LienardVariant::I: {
      const double gamma_level = P_inf * K1 / T * 1.01 + 1e-9;
      // smallest sampled radius beyond which every sphere minimum exceeds gamma
      std::vector<double> radii = plan.radii;
      std::sort(radii.begin(), radii.end());
      std::vector<double> minima(radii.size(), std::numeric_limits<double>::infinity());
      for (std::size_t k = 0; k < radii.size(); ++k)
        for (const auto& dir : plan.directions) {
          const Vec x = radii[k] * dir;
          for (double t : plan.t_grid)
            minima[k] = std::min(minima[k], h.eval(t, x).dot(x));
        }
      double R_gamma = radii.back();
      for (std::size_t k = 0; k < radii.size(); ++k) {
        bool all_above = true;
        for (std::size_t j = k; j < radii.size(); ++j)
          if (minima[j] <= gamma_level) {
            all_above = false;
            break;
          }
        if (all_above) {
          R_gamma = radii[k];
          break;
        }
      }
      s.constants["gamma_level"] = gamma_level;
      s.constants["R_gamma"] = R_gamma;
      R_star = R_gamma + K1 * T;
      break;
    }
    case LienardVariant::II: {
      // rho* = sqrt(n) K1; R_hat estimated by the same suffix search the
      // checker uses, at offset radius rho*
      const double rho_star = std::sqrt(static_cast<double>(n)) * K1;
      std::vector<double> radii = plan.radii;
      std::sort(radii.begin(), radii.end());
      std::vector<double> worst(radii.size(), std::numeric_limits<double>::infinity());
      for (std::size_t k = 0; k < radii.size(); ++k)
        for (const auto& dir : plan.directions) {
          const Vec x = radii[k] * dir;
          for (const auto& yu : plan.y_offsets_unit)
            for (double t : plan.t_grid)
              worst[k] = std::min(worst[k], h.eval(t, x + rho_star * yu).dot(x));
        }
      double R_hat = radii.back();
      double suffix = std::numeric_limits<double>::infinity();
      std::vector<double> suffix_min(radii.size());
      for (std::size_t k = radii.size(); k-- > 0;) {
        suffix = std::min(suffix, worst[k]);
        suffix_min[k] = suffix;
      }
      for (std::size_t k = 0; k + 1 < radii.size(); ++k)
        if (suffix_min[k + 1] >= 0.0) {
          R_hat = radii[k];
          break;
        }
      s.warnings.push_back("R_hat for variant (ii) is a sampled estimate");
      s.constants["R_hat"] = R_hat;
      R_star = std::sqrt(static_cast<double>(n)) * (R_hat + K1);
      break;
    }
    case LienardVariant::III:
      R_star = std::sqrt(static_cast<double>(n)) * (params.d + K1);
      break;
  }

  auto target = [G, h, p = s.forcing](double t, const Vec& x, const Vec& v) -> Vec {
    Vec out = G.hess(x) * v + h.eval(t, x);
    if (p) out += p(t);
    return out;
  };
  auto autonomous = [](const Vec& x, const Vec&) -> Vec { return x; };
  s.family = HomotopyFamily::convex(n, T, target, autonomous);
  s.bound_set = BallSet{Vec::Zero(n), R_star};
  s.bounding_fn = BoundingFn::sphere(n, R_star);
  s.interior_point = Vec::Zero(n);

  // Nagumo via the p = 1 recipe: ||(phi(x'))'||_L1 <= maxHess K1 + T max||h_lambda|| + ||p||_L1
  double max_hess = 0.0, max_h = 0.0;
  {
    const auto ts = time_grid(T, 32);
    for (const auto& dir : unit_directions(n, 16))
      for (double r : linspace(0.0, R_star, 9)) {
        const Vec x = r * dir;
        max_hess = std::max(max_hess, spectral_norm(G.hess(x)));
        for (double t : ts) max_h = std::max(max_h, h.eval(t, x).norm());
      }
  }
  const double max_h_lambda = std::max(max_h, R_star);
  NagumoRecipe recipe;
  recipe.M0 = 0.0;
  recipe.M1 = max_hess * K1 + T * max_h_lambda + p_l1;
  recipe.p = 1.0;
  recipe.K_phi = lemma21_bound(0.0, recipe.M1, 1.0, T);
  recipe.K_deriv = phi.inverse_radius_bound(recipe.K_phi);
  recipe.description = "L1 bound of (phi(x'))'; K via p = 1";
  s.nagumo = recipe;

  s.constants["K0"] = K0;
  s.constants["eta"] = eta;
  s.constants["M_eta"] = M_eta;
  s.constants["P_inf"] = P_inf;
  s.constants["K1"] = K1;
  s.constants["R_star"] = R_star;
  s.constants["d"] = params.d;
  s.constants["R"] = params.R;
  s.constants["max_hess"] = max_hess;
  s.constants["K_phi"] = recipe.K_phi;
  s.constants["K_deriv"] = recipe.K_deriv;

  s.expected["H_phi"] = Verdict::HoldsAtSamples;
  switch (variant) {
    case LienardVariant::Thm0:
      s.expected["H_H"] = Verdict::HoldsAtSamples;
      break;
    case LienardVariant::I:
      s.expected["H_H_plus"] = Verdict::HoldsAtSamples;
      s.expected["lienard_i"] = Verdict::HoldsAtSamples;
      break;
    case LienardVariant::II:
      s.expected["H_H_plus"] = Verdict::HoldsAtSamples;
      s.expected["lienard_ii"] = Verdict::HoldsAtSamples;
      break;
    case LienardVariant::III:
      s.expected["H_H_plus"] = Verdict::HoldsAtSamples;
      s.expected["lienard_iii"] = Verdict::HoldsAtSamples;
      s.expected["villari"] = Verdict::HoldsAtSamples;
      break;
  }
  s.expected["degree"] = Verdict::HoldsAtSamples;

  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    for (double scale : {params.d + 0.5, 2.0 * params.d + 1.0}) {
      s.villari_points.push_back(scale * e);
      s.villari_points.push_back(-scale * e);
    }
  }
  s.villari_points.push_back(Vec::Constant(n, params.d + 1.0));
  return s;
}

Scenario build_remark33_example(int k, double eps) {
  if (k < 1 || k > 3) throw BuildError("build_remark33_example: k must be 1, 2 or 3");
  if (k == 1 && !(eps > 0.0 && eps < 1.0 / M_PI))
    throw BuildError("build_remark33_example: eps must lie in (0, 1/pi)");
  Scenario s;
  s.name = "remark33_" + std::to_string(k);
  s.kind = ScenarioKind::FieldOnly;
  s.n = 2;
  s.T = 1.0;
  s.phi = PhiMap::p_laplacian(2, 2.0);
  s.interior_point = Vec::Zero(2);

  auto q = [](double x) { return x * std::exp(-std::abs(x)); };
  switch (k) {
    case 1:
      s.field = VectorField::autonomous(2, 1.0, [eps](const Vec& x) -> Vec {
        Vec h(2);
        h << x[0] - 2.0 * x[1] + eps * std::atan(x[0]), x[1] + eps * std::atan(x[1]);
        return h;
      });
      break;
    case 2:
      s.field = VectorField::autonomous(2, 1.0, [q](const Vec& x) -> Vec {
        const double qn = q(x.norm());
        Vec h(2);
        h << (x[0] - x[1]) * qn, x[1] * qn;
        return h;
      });
      break;
    case 3:
      s.field = VectorField::autonomous(2, 1.0, [q](const Vec& x) -> Vec {
        Vec h(2);
        h << (std::pow(x[0], 3) - 3.0 * x[0]) * q(std::abs(x[0])),
            (std::pow(x[1], 3) - 3.0 * x[1]) * q(std::abs(x[1]));
        return h;
      });
      break;
  }

  const double d = (k == 3) ? std::sqrt(3.0) : 1.0;
  auto plan = LienardParams::defaults(2, 1.0, d);
  if (k == 1) {
    Vec px(2), py(2);
    px << 10.0, 10.0;
    py << -1.0, 0.0;
    plan.probes.emplace_back(px, py);
  }
  if (k == 3) {
    for (double span : {20.0, 50.0, 100.0}) {
      Vec px(2);
      px << span, 1.0;
      plan.probes.emplace_back(px, Vec::Zero(2));
    }
  }
  s.lienard_params = plan;
  s.constants["eps"] = eps;
  s.constants["d"] = d;

  s.expected["H_H_plus"] = Verdict::HoldsAtSamples;
  s.expected["lienard_i"] = (k == 1) ? Verdict::HoldsAtSamples : Verdict::Violated;
  s.expected["lienard_ii"] = (k == 2) ? Verdict::HoldsAtSamples : Verdict::Violated;
  s.expected["lienard_iii"] = (k == 3) ? Verdict::HoldsAtSamples : Verdict::Violated;
  return s;
}

BlowUpSpec build_blowup(double gamma, const PhiMap& scalar_phi) {
  const auto integ = check_blowup_integrability(scalar_phi, gamma);
  if (!integ.convergent)
    throw BuildError("build_blowup: the integrability hypothesis fails (divergent tail)");
  BlowUpSpec spec;
  spec.phi = scalar_phi;
  spec.gamma = gamma;
  return spec;
}

Scenario make_blowup_scenario(double gamma, const PhiMap& scalar_phi) {
  Scenario s;
  s.name = "blowup";
  s.kind = ScenarioKind::BlowUp;
  s.n = 1;
  s.T = 1.0;
  s.phi = scalar_phi;
  s.interior_point = Vec::Zero(1);
  s.blowup = build_blowup(gamma, scalar_phi);
  s.constants["gamma"] = gamma;
  s.expected["blowup_integrability"] = Verdict::HoldsAtSamples;
  s.expected["blowup_identity"] = Verdict::HoldsAtSamples;
  return s;
}

// ---------------------------------------------------------------------------
// Verification orchestration
// ---------------------------------------------------------------------------

VerifyOptions VerifyOptions::defaults(int n) {
  VerifyOptions opt;
  if (n >= 3) opt.boundary_dirs = 1024;
  return opt;
}

const HypothesisReport* ScenarioVerification::find(const std::string& id) const {
  for (const auto& r : reports)
    if (r.condition_id == id) return &r;
  return nullptr;
}

bool ScenarioVerification::any_expected_hold_violated() const {
  for (const auto& [id, want] : expected) {
    if (want != Verdict::HoldsAtSamples) continue;
    const auto* r = find(id);
    if (r && r->verdict == Verdict::Violated) return true;
  }
  return false;
}

bool ScenarioVerification::any_expected_hold_inconclusive() const {
  for (const auto& [id, want] : expected) {
    if (want != Verdict::HoldsAtSamples) continue;
    const auto* r = find(id);
    if (!r || r->verdict == Verdict::Inconclusive) return true;
  }
  return false;
}

bool ScenarioVerification::matrix_matches() const {
  for (const auto& [id, want] : expected) {
    const auto* r = find(id);
    if (!r || r->verdict != want) return false;
  }
  return true;
}

namespace {

HypothesisReport blowup_identity_report(const BlowUpSpec& spec, int samples) {
  HypothesisReport rep;
  rep.condition_id = "blowup_identity";
  const double expo = (1.0 + spec.gamma) / spec.gamma;
  double worst = 0.0;
  double worst_t = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = 0.005 + (0.985 - 0.005) * i / (samples - 1);
    const double ht = 1e-5 * (1.0 - t);
    auto u_of = [&](double tt) {
      return spec.phi.apply_scalar(blowup_solution(spec, tt).second);
    };
    const double du = (u_of(t + ht) - u_of(t - ht)) / (2.0 * ht);
    const double rhs = spec.gamma * std::pow(u_of(t), expo);
    const double rel = std::abs(du - rhs) / std::max(std::abs(rhs), 1e-300);
    if (rel > worst) {
      worst = rel;
      worst_t = t;
    }
  }
  rep.margin = 1e-4 - worst;
  if (worst <= 1e-4) {
    rep.verdict = Verdict::HoldsAtSamples;
  } else {
    rep.verdict = Verdict::Violated;
    Witness w;
    w.t = worst_t;
    rep.witness = w;
  }
  rep.note = "max relative defect " + std::to_string(worst);
  return rep;
}

}  // namespace

ScenarioVerification verify_scenario(const Scenario& scenario, const VerifyOptions& opt) {
  ScenarioVerification out;
  out.expected = scenario.expected;
  const auto wants = [&](const char* id) { return scenario.expected.count(id) > 0; };
  const auto t_grid = time_grid(scenario.T, opt.time_nodes);

  // boundary samples of the bound set, shared by several checkers
  std::vector<Vec> boundary;
  if (scenario.bounding_fn &&
      (wants("cond_Vprime") || wants("cond_C") || wants("H_V") || wants("outer_normal") ||
       wants("degree"))) {
    boundary = sample_boundary(*scenario.bounding_fn, scenario.interior_point,
                               opt.boundary_dirs, opt.root_tol)
                   .points;
  }

  if (wants("cond_Vprime"))
    out.reports.push_back(
        check_grad_nonvanishing(*scenario.bounding_fn, boundary, opt.grad_tol));

  if (wants("cond_C")) {
    HypothesisReport rep;
    rep.condition_id = "cond_C";
    double min_eig = std::numeric_limits<double>::infinity();
    Vec worst_u;
    for (const auto& u : boundary) {
      const auto res = check_condition_C(*scenario.bounding_fn, u, opt.cond_tol);
      if (res.min_tangent_eig < min_eig) {
        min_eig = res.min_tangent_eig;
        worst_u = u;
      }
    }
    rep.margin = min_eig;
    if (min_eig >= -opt.cond_tol) {
      rep.verdict = Verdict::HoldsAtSamples;
    } else {
      rep.verdict = Verdict::Violated;
      Witness w;
      w.x = worst_u;
      rep.witness = w;
    }
    out.reports.push_back(rep);
  }

  if (wants("H_V")) {
    double y_cap = opt.y_cap ? *opt.y_cap : 10.0;
    std::string cap_note;
    if (!opt.y_cap && scenario.nagumo) {
      y_cap = scenario.nagumo->K_deriv;
    } else if (!opt.y_cap) {
      cap_note = "no Nagumo bound available; tangent cap defaulted to 10";
    }
    HVOptions hv = HVOptions::defaults(scenario.T, y_cap);
    hv.t_grid = t_grid;
    hv.tangent_dirs = opt.tangent_dirs;
    auto rep = check_HV(*scenario.bounding_fn, scenario.family, scenario.phi, boundary, hv);
    if (!cap_note.empty()) rep.note = cap_note + (rep.note.empty() ? "" : "; " + rep.note);
    out.reports.push_back(rep);
  }

  if (wants("hartman")) {
    const auto* ball = std::get_if<BallSet>(&scenario.bound_set);
    if (!ball) throw InputError("verify_scenario: hartman requires a ball bound set");
    out.reports.push_back(check_hartman(scenario.field, ball->R, t_grid, opt.sphere_dirs));
  }

  if (wants("poincare_miranda")) {
    const auto* box = std::get_if<BoxSet>(&scenario.bound_set);
    if (!box) throw InputError("verify_scenario: poincare_miranda requires a box");
    out.reports.push_back(
        check_poincare_miranda(scenario.field, *box, t_grid, opt.face_samples, opt.seed));
  }

  if (wants("outer_normal")) {
    std::vector<std::pair<Vec, Vec>> normals;
    if (const auto* ball = std::get_if<BallSet>(&scenario.bound_set)) {
      for (const auto& d : unit_directions(scenario.n, opt.sphere_dirs))
        normals.emplace_back(ball->center + ball->R * d, d);
    } else if (const auto* box = std::get_if<BoxSet>(&scenario.bound_set)) {
      for (int i = 0; i < scenario.n; ++i) {
        for (int side = 0; side < 2; ++side) {
          Vec nu = Vec::Zero(scenario.n);
          nu[i] = side == 0 ? -1.0 : 1.0;
          // face centers and corners
          std::vector<Vec> pts;
          Vec center = 0.5 * (box->lo + box->hi);
          center[i] = side == 0 ? box->lo[i] : box->hi[i];
          pts.push_back(center);
          for (const auto& corner_pt :
               uniform_points_in_box(box->lo, box->hi, opt.face_samples, opt.seed)) {
            Vec u = corner_pt;
            u[i] = side == 0 ? box->lo[i] : box->hi[i];
            pts.push_back(u);
          }
          for (const auto& u : pts) normals.emplace_back(u, nu);
        }
      }
    } else {
      for (const auto& u : boundary)
        normals.emplace_back(u, scenario.bounding_fn->grad(u));
    }
    out.reports.push_back(
        check_outer_normal(scenario.field, normals, t_grid, scenario.interior_point));
  }

  if (wants("H_phi")) {
    const double eta = scenario.constants.count("eta") ? scenario.constants.at("eta") : 1.0;
    const auto res = check_h_phi(scenario.phi, eta, geomspace(1e-3, 1e3, 40), 16);
    HypothesisReport rep;
    rep.condition_id = "H_phi";
    rep.verdict = res.verdict;
    rep.margin = res.M_eta;
    rep.note = "sampled M_eta at eta = " + std::to_string(eta);
    if (res.witness) {
      Witness w;
      w.x = *res.witness;
      rep.witness = w;
    }
    out.reports.push_back(rep);
  }

  const bool wants_lienard = wants("H_H") || wants("H_H_plus") || wants("lienard_i") ||
                             wants("lienard_ii") || wants("lienard_iii");
  if (wants_lienard) {
    auto plan = scenario.lienard_params
                    ? *scenario.lienard_params
                    : LienardParams::defaults(scenario.n, 1.0, 1.0);
    const auto battery = check_lienard_conditions(scenario.field, plan);
    for (const char* id : {"H_H", "H_H_plus", "lienard_i", "lienard_ii", "lienard_iii"})
      if (wants(id)) out.reports.push_back(battery.at(id));
  }

  if (wants("villari")) {
    const double d = scenario.constants.count("d") ? scenario.constants.at("d") : 1.0;
    std::vector<Vec> points = scenario.villari_points;
    if (points.empty())
      points.push_back(Vec::Constant(scenario.n, d + 1.0));
    out.reports.push_back(
        check_villari(scenario.field, d, scenario.T, points, opt.villari_quad));
  }

  if (wants("rayleigh_parallel") || wants("rayleigh_bounded")) {
    std::vector<Vec> y_samples;
    y_samples.push_back(Vec::Zero(scenario.n));
    for (double r : geomspace(1e-2, 1e2, 13))
      for (const auto& d : unit_directions(scenario.n, 8)) y_samples.push_back(r * d);
    const auto structure = check_rayleigh_structure(scenario.g_velocity, scenario.friction,
                                                    scenario.phi, y_samples);
    if (wants("rayleigh_parallel")) out.reports.push_back(structure.parallel);
    if (wants("rayleigh_bounded")) out.reports.push_back(structure.bounded);
  }

  if (wants("NH1") || wants("NH2")) {
    double R_ball = 1.0;
    if (const auto* ball = std::get_if<BallSet>(&scenario.bound_set))
      R_ball = ball->R;
    else if (const auto* box = std::get_if<BoxSet>(&scenario.bound_set))
      R_ball = std::max(box->lo.cwiseAbs().maxCoeff(), box->hi.cwiseAbs().maxCoeff()) *
               std::sqrt(static_cast<double>(scenario.n));
    std::vector<Vec> x_samples;
    for (const auto& d : unit_directions(scenario.n, 16))
      for (double r : linspace(0.0, R_ball, 5)) x_samples.push_back(r * d);
    const double y_cap = scenario.nagumo ? 10.0 * scenario.nagumo->K_deriv : 10.0;
    std::vector<Vec> y_samples;
    y_samples.push_back(Vec::Zero(scenario.n));
    for (const auto& d : unit_directions(scenario.n, 8))
      for (double r : geomspace(1e-2 * y_cap, y_cap, 5)) y_samples.push_back(r * d);
    VectorField lifted = scenario.field;
    const double eta_const =
        scenario.constants.count("eta_const") ? scenario.constants.at("eta_const") : 1.0;

    if (wants("NH1")) {
      auto res = check_nh1(
          lifted, [eta_const](double) { return eta_const; }, R_ball, t_grid, x_samples,
          y_samples);
      HypothesisReport rep = res.report;
      if (rep.holds() && !res.integral_divergent) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "envelope holds but the s/eta integral saturates";
      }
      out.reports.push_back(rep);
    }
    if (wants("NH2"))
      out.reports.push_back(
          check_nh2(lifted, 0.0, eta_const, R_ball, t_grid, x_samples, y_samples));
  }

  if (scenario.blowup) {
    if (wants("blowup_integrability")) {
      const auto integ =
          check_blowup_integrability(scenario.blowup->phi, scenario.blowup->gamma);
      out.integrability = integ;
      HypothesisReport rep;
      rep.condition_id = "blowup_integrability";
      rep.verdict = integ.convergent ? Verdict::HoldsAtSamples : Verdict::Violated;
      rep.margin = 0.5 - integ.last_ratio;
      rep.note = "final decade-contribution ratio " + std::to_string(integ.last_ratio);
      out.reports.push_back(rep);
    }
    if (wants("blowup_identity"))
      out.reports.push_back(blowup_identity_report(*scenario.blowup, 100));
  }

  if (wants("degree") && scenario.kind == ScenarioKind::PeriodicSolve) {
    std::vector<Vec> cert_boundary = boundary;
    if (cert_boundary.empty()) {
      if (const auto* ball = std::get_if<BallSet>(&scenario.bound_set)) {
        for (const auto& d : unit_directions(scenario.n, opt.sphere_dirs))
          cert_boundary.push_back(ball->center + ball->R * d);
      } else if (const auto* box = std::get_if<BoxSet>(&scenario.bound_set)) {
        // push interior samples to the nearest face
        for (const auto& p : uniform_points_in_box(box->lo, box->hi,
                                                   opt.sphere_dirs, opt.seed)) {
          Vec u = p;
          int best_i = 0;
          double best_gap = std::numeric_limits<double>::infinity();
          bool to_hi = true;
          for (int i = 0; i < scenario.n; ++i) {
            if (box->hi[i] - p[i] < best_gap) {
              best_gap = box->hi[i] - p[i];
              best_i = i;
              to_hi = true;
            }
            if (p[i] - box->lo[i] < best_gap) {
              best_gap = p[i] - box->lo[i];
              best_i = i;
              to_hi = false;
            }
          }
          u[best_i] = to_hi ? box->hi[best_i] : box->lo[best_i];
          cert_boundary.push_back(u);
        }
      }
    }
    const Vec zero_y = Vec::Zero(scenario.n);
    auto f0 = [&](const Vec& x) { return scenario.family.f0(x, zero_y); };
    const auto cert = degree_one_certificate(f0, cert_boundary, scenario.interior_point);
    out.degree = cert;
    HypothesisReport rep;
    rep.condition_id = "degree";
    rep.verdict = cert.certified ? Verdict::HoldsAtSamples : Verdict::Violated;
    rep.margin = cert.min_field_norm;
    rep.note = cert.note;
    if (cert.witness) {
      Witness w;
      w.x = *cert.witness;
      rep.witness = w;
    }
    out.reports.push_back(rep);
  }

  if (scenario.bounding_fn && scenario.kind == ScenarioKind::PeriodicSolve) {
    out.convexity = convexity_via_condition_C(*scenario.bounding_fn,
                                              scenario.interior_point,
                                              std::min(opt.boundary_dirs, 128),
                                              opt.cond_tol, opt.root_tol);
  }

  return out;
}

}  // namespace phibvp
