#include "phibvp/report.hpp"

#include "phibvp/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace phibvp {

double json_safe(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0.0 ? 1e308 : -1e308;
  return v;
}

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_safe(v[i]));
  return arr;
}

json witness_to_json(const Witness& w) {
  json j;
  j["t"] = json_safe(w.t);
  j["lambda"] = json_safe(w.lambda);
  if (w.x.size() > 0) j["x"] = vec_to_json(w.x);
  if (w.y.size() > 0) j["y"] = vec_to_json(w.y);
  return j;
}

void write_csv_row(std::ostream& os, const std::vector<double>& row) {
  char buf[64];
  for (std::size_t i = 0; i < row.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
    os << (i ? "," : "") << buf;
  }
  os << "\n";
}

}  // namespace

json to_json(const HypothesisReport& rep) {
  json j;
  j["condition"] = rep.condition_id;
  j["verdict"] = to_string(rep.verdict);
  j["margin"] = json_safe(rep.margin);
  if (rep.witness) j["witness"] = witness_to_json(*rep.witness);
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

json to_json(const DegreeCertificate& cert) {
  json j;
  switch (cert.method) {
    case DegreeCertificate::Method::Sign1d: j["method"] = "sign_1d"; break;
    case DegreeCertificate::Method::Winding2d: j["method"] = "winding_2d"; break;
    case DegreeCertificate::Method::BoundaryHomotopy: j["method"] = "boundary_homotopy"; break;
  }
  j["certified"] = cert.certified;
  if (cert.value) j["value"] = *cert.value;
  j["boundary_samples"] = cert.boundary_samples;
  j["min_field_norm"] = json_safe(cert.min_field_norm);
  if (cert.witness) j["witness"] = vec_to_json(*cert.witness);
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

json to_json(const ConvexityVerdict& verdict) {
  json j;
  j["status"] = to_string(verdict.status);
  j["min_tangent_eig"] = json_safe(verdict.min_tangent_eig);
  j["precondition_ok"] = verdict.precondition_ok;
  if (verdict.witness) j["witness"] = vec_to_json(*verdict.witness);
  if (!verdict.note.empty()) j["note"] = verdict.note;
  return j;
}

json verification_report(const Scenario& scenario, const ScenarioVerification& ver,
                         std::uint64_t seed) {
  json j;
  j["schema"] = 1;
  j["scenario"] = scenario.name;
  j["seed"] = seed;
  j["n"] = scenario.n;
  j["T"] = json_safe(scenario.T);
  json conditions = json::array();
  for (const auto& rep : ver.reports) {
    json c = to_json(rep);
    const auto it = ver.expected.find(rep.condition_id);
    if (it != ver.expected.end()) {
      c["expected"] = to_string(it->second);
      c["as_expected"] = (rep.verdict == it->second);
    }
    conditions.push_back(c);
  }
  j["conditions"] = conditions;
  if (ver.degree) j["degree"] = to_json(*ver.degree);
  if (ver.convexity) j["convexity"] = to_json(*ver.convexity);
  if (ver.integrability) {
    json integ;
    integ["convergent"] = ver.integrability->convergent;
    integ["last_ratio"] = json_safe(ver.integrability->last_ratio);
    json partials = json::array();
    for (double p : ver.integrability->partials) partials.push_back(json_safe(p));
    integ["partial_integrals"] = partials;
    j["integrability"] = integ;
  }
  json constants;
  for (const auto& [k, v] : scenario.constants) constants[k] = json_safe(v);
  j["constants"] = constants;
  if (!scenario.warnings.empty()) j["warnings"] = scenario.warnings;
  j["matrix_matches"] = ver.matrix_matches();
  j["all_expected_hold"] =
      !ver.any_expected_hold_violated() && !ver.any_expected_hold_inconclusive();
  return j;
}

json conclusion_report(const Scenario& scenario, const ContinuationResult& cont,
                       const ConclusionReport& conclusion, std::uint64_t seed) {
  json j;
  j["schema"] = 1;
  j["scenario"] = scenario.name;
  j["seed"] = seed;
  j["continuation"] = cont.converged() ? "converged" : "stalled";
  j["last_good_lambda"] = json_safe(cont.last_good_lambda);
  if (!cont.detail.empty()) j["detail"] = cont.detail;
  j["trace_length"] = cont.trace.size();
  if (cont.solution) {
    j["residual_norm"] = json_safe(cont.solution->residual_norm);
    j["N"] = cont.solution->N;
  }
  json c;
  c["contained"] = conclusion.contained;
  c["containment_margin"] = json_safe(conclusion.containment_margin);
  c["derivative_bounded"] = conclusion.derivative_bounded;
  c["derivative_margin"] = json_safe(conclusion.derivative_margin);
  c["max_speed"] = json_safe(conclusion.max_speed);
  c["nagumo_bound"] = json_safe(conclusion.nagumo_bound);
  j["conclusion"] = c;
  return j;
}

void write_solution_csv(std::ostream& os, const DiscreteSolution& sol, const PhiMap& phi) {
  os << "t";
  for (int i = 1; i <= sol.n; ++i) os << ",x_" << i;
  for (int i = 1; i <= sol.n; ++i) os << ",dx_" << i;
  for (int i = 1; i <= sol.n; ++i) os << ",y_" << i;
  os << "\n";
  for (int j = 0; j <= sol.N; ++j) {
    const int node = j % sol.N;
    const double t = (j == sol.N) ? sol.T : sol.t(node);
    const Vec y = sol.y.row(node);
    const Vec dx = phi.invert(y);
    std::vector<double> row;
    row.push_back(t);
    for (int i = 0; i < sol.n; ++i) row.push_back(sol.x(node, i));
    for (int i = 0; i < sol.n; ++i) row.push_back(dx[i]);
    for (int i = 0; i < sol.n; ++i) row.push_back(y[i]);
    write_csv_row(os, row);
  }
}

void write_blowup_csv(std::ostream& os, const BlowUpSpec& spec) {
  os << "t,x,dx\n";
  std::vector<double> ts = linspace(0.0, 0.99, 199);
  for (int k = 3; k <= 6; ++k) ts.push_back(1.0 - std::pow(10.0, -k));
  for (double t : ts) {
    const auto [x, dx] = blowup_solution(spec, t);
    write_csv_row(os, {t, x, dx});
  }
}

// ---------------------------------------------------------------------------
// Config ingestion
// ---------------------------------------------------------------------------

namespace {

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("config: ") + key + " must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("config: ") + key + " must be an integer");
  return j.at(key).get<int>();
}

Vec get_vec(const json& j, const char* key, const Vec& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ConfigError(std::string("config: ") + key + " must be an array");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

// phase-shifted cosine forcing: c_i(t) = amp cos(2 pi t / T - i pi / 2)
std::function<Vec(double)> trig_forcing(int n, double T, double amp) {
  return [n, T, amp](double t) -> Vec {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = amp * std::cos(2.0 * M_PI * t / T - i * M_PI_2);
    return c;
  };
}

std::function<Vec(double)> trig_forcing_antiderivative(int n, double T, double amp) {
  return [n, T, amp](double t) -> Vec {
    Vec P(n);
    const double w = 2.0 * M_PI / T;
    for (int i = 0; i < n; ++i) P[i] = amp / w * std::sin(w * t - i * M_PI_2);
    return P;
  };
}

VectorField remark33_field(int k, double eps) {
  return build_remark33_example(k, eps).field;
}

Scenario user_system_scenario(const json& config) {
  const auto& sys = config.at("system");
  const int n = get_int(sys, "n", 1);
  const double T = get_num(sys, "T", 1.0);
  if (n < 1) throw ConfigError("config: system.n must be positive");
  if (!sys.contains("field")) throw ConfigError("config: system.field missing");
  const auto& fj = sys.at("field");

  Mat A = Mat::Zero(n, n);
  if (fj.contains("linear")) {
    const auto& rows = fj.at("linear");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
      throw ConfigError("config: system.field.linear must be an n x n matrix");
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  Vec cubic = get_vec(fj, "cubic_diag", Vec::Zero(n));
  Vec quadratic = get_vec(fj, "quadratic_diag", Vec::Zero(n));
  Vec cos_amp = Vec::Zero(n);
  double cos_k = 1.0;
  if (fj.contains("forcing_cos")) {
    cos_amp = get_vec(fj.at("forcing_cos"), "amp", Vec::Zero(n));
    cos_k = get_num(fj.at("forcing_cos"), "k", 1.0);
  }
  auto f = [n, T, A, cubic, quadratic, cos_amp, cos_k](double t, const Vec& x) -> Vec {
    Vec out = A * x;
    for (int i = 0; i < n; ++i)
      out[i] += cubic[i] * x[i] * x[i] * x[i] + quadratic[i] * x[i] * x[i];
    out -= cos_amp * std::cos(2.0 * M_PI * cos_k * t / T);
    return out;
  };

  // user-declared expectations override the defaults of the chosen geometry
  auto apply_expected_override = [&sys](Scenario& s) {
    if (!sys.contains("expected")) return;
    s.expected.clear();
    for (const auto& [key, val] : sys.at("expected").items()) {
      const std::string v = val.get<std::string>();
      Verdict verdict;
      if (v == "holds_at_samples")
        verdict = Verdict::HoldsAtSamples;
      else if (v == "violated")
        verdict = Verdict::Violated;
      else if (v == "inconclusive")
        verdict = Verdict::Inconclusive;
      else
        throw ConfigError("config: bad expected verdict '" + v + "'");
      s.expected[key] = verdict;
    }
  };

  // the bound set may sit inside the system block or at the top level
  if (!sys.contains("bound_set") && !config.contains("bound_set"))
    throw ConfigError("config: system.bound_set missing");
  const auto& bs = sys.contains("bound_set") ? sys.at("bound_set") : config.at("bound_set");
  const PhiMap phi = phi_from_config(config, n);
  if (bs.contains("ball")) {
    const double R = get_num(bs.at("ball"), "R", 1.0);
    Scenario s = build_hartman_knobloch(n, 2.0, R, trig_forcing(n, T, 0.0), T);
    // replace the field and family with the user system, keep the ball geometry
    s.name = "system";
    s.phi = phi;
    s.field = VectorField::time_dependent(n, T, f);
    auto target = [f](double t, const Vec& x, const Vec&) { return f(t, x); };
    auto autonomous = [](const Vec& x, const Vec&) -> Vec { return x; };
    s.family = HomotopyFamily::convex(n, T, target, autonomous);
    s.expected.clear();
    s.expected["hartman"] = Verdict::HoldsAtSamples;
    s.expected["H_V"] = Verdict::HoldsAtSamples;
    s.expected["degree"] = Verdict::HoldsAtSamples;
    double max_f = 0.0;
    for (const auto& d : unit_directions(n, 32))
      for (int j = 0; j < 32; ++j) max_f = std::max(max_f, f(T * j / 32.0, R * d).norm());
    NagumoRecipe recipe;
    recipe.M0 = 0.0;
    recipe.M1 = max_f + R;
    recipe.p = std::numeric_limits<double>::infinity();
    recipe.K_phi = lemma21_bound(0.0, recipe.M1, recipe.p, T);
    recipe.K_deriv = phi.inverse_radius_bound(recipe.K_phi);
    recipe.description = "K = T R2 with sampled R2 (p = inf)";
    s.nagumo = recipe;
    apply_expected_override(s);
    return s;
  }
  if (bs.contains("box")) {
    BoxSet box;
    box.lo = get_vec(bs.at("box"), "lo", Vec::Constant(n, -1.0));
    box.hi = get_vec(bs.at("box"), "hi", Vec::Constant(n, 1.0));
    Scenario s = build_poincare_miranda(box, f, phi, T);
    s.name = "system";
    apply_expected_override(s);
    return s;
  }
  throw ConfigError("config: system.bound_set needs a ball or box");
}

}  // namespace

PhiMap phi_from_config(const json& config, int n) {
  if (!config.contains("phi")) return PhiMap::p_laplacian(n, 2.0);
  const auto& pj = config.at("phi");
  const std::string kind = pj.value("kind", "identity");
  const double tol = get_num(pj, "tolerance", 1e-12);
  if (kind == "identity") return PhiMap::p_laplacian(n, 2.0);
  if (kind == "p_laplacian") {
    const double p = get_num(pj, "p", 2.0);
    if (!(p > 1.0)) throw ConfigError("config: phi.p must exceed 1");
    return PhiMap::p_laplacian(n, p);
  }
  if (kind == "radial_shifted") {
    // A(xi) = a + ||xi||^(p-2): a strictly positive radial profile exercising
    // the root-finding inverse
    const double a = get_num(pj, "a", 1.0);
    const double p = get_num(pj, "p", 3.0);
    if (!(a > 0.0)) throw ConfigError("config: phi.a must be positive");
    return PhiMap::radial(
        n, [a, p](const Vec& xi) { return a + std::pow(xi.norm(), p - 2.0); }, tol);
  }
  throw ConfigError("config: unknown phi.kind '" + kind + "'");
}

Scenario scenario_from_config(const json& config) {
  if (!config.is_object() || config.empty())
    throw ConfigError("config: empty or not an object");
  if (config.contains("system")) return user_system_scenario(config);
  if (!config.contains("scenario")) throw ConfigError("config: no scenario or system given");
  const std::string name = config.at("scenario").get<std::string>();
  const json params = config.value("params", json::object());

  if (name == "hartman_knobloch") {
    const int n = get_int(params, "n", 2);
    const double T = get_num(params, "T", 1.0);
    double p = 3.0;
    if (config.contains("phi")) p = get_num(config.at("phi"), "p", 3.0);
    p = get_num(params, "p", p);
    const double R = get_num(params, "R", 2.0);
    const double amp = get_num(params, "forcing_amp", 1.0);
    return build_hartman_knobloch(n, p, R, trig_forcing(n, T, amp), T);
  }
  if (name == "poincare_miranda") {
    const int n = get_int(params, "n", 1);
    const double T = get_num(params, "T", 1.0);
    BoxSet box;
    box.lo = get_vec(params, "lo", Vec::Constant(n, -2.0));
    box.hi = get_vec(params, "hi", Vec::Constant(n, 2.0));
    auto f = [n, T](double t, const Vec& x) -> Vec {
      Vec out(n);
      for (int i = 0; i < n; ++i)
        out[i] = std::pow(x[i], 3) - std::cos(2.0 * M_PI * t / T);
      return out;
    };
    return build_poincare_miranda(box, f, phi_from_config(config, n), T);
  }
  if (name == "rayleigh") {
    const int n = get_int(params, "n", 2);
    const double T = get_num(params, "T", 1.0);
    const double R = get_num(params, "R", 2.0);
    const double amp = get_num(params, "forcing_amp", 1.0);
    auto g = [](const Vec& y) -> Vec { return -y; };
    FrictionPotential G([](const Vec& z) { return -0.5 * z.squaredNorm(); },
                        [](const Vec& z) -> Vec { return -z; });
    auto c = trig_forcing(n, T, amp);
    auto h = [c](double t, const Vec& x) -> Vec { return x - c(t); };
    return build_rayleigh(g, G, h, BoundingFn::sphere(n, R), phi_from_config(config, n), T);
  }
  if (name == "lienard_0" || name == "lienard_i" || name == "lienard_ii" ||
      name == "lienard_iii") {
    const double T = get_num(params, "T", 1.0);
    LienardBuildParams bp;
    bp.R = get_num(params, "R", 1.0);
    bp.d = get_num(params, "d", 1.0);
    if (name == "lienard_0") {
      const int n = get_int(params, "n", 1);
      FrictionPotential G([](const Vec& x) { return 0.5 * x.squaredNorm(); },
                          [](const Vec& x) -> Vec { return x; });
      auto h = VectorField::autonomous(n, T, [](const Vec& x) -> Vec { return x; });
      return build_lienard(G, h, nullptr, nullptr, LienardVariant::Thm0, bp,
                           phi_from_config(config, n), T);
    }
    if (name == "lienard_iii") {
      const int n = get_int(params, "n", 1);
      FrictionPotential G([](const Vec& x) { return 0.5 * x.squaredNorm(); },
                          [](const Vec& x) -> Vec { return x; });
      auto h = VectorField::autonomous(n, T, [](const Vec& x) -> Vec {
        Vec out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::pow(x[i], 3);
        return out;
      });
      const double amp = get_num(params, "forcing_amp", 1.0);
      return build_lienard(G, h, trig_forcing(n, T, amp),
                           trig_forcing_antiderivative(n, T, amp), LienardVariant::III, bp,
                           phi_from_config(config, n), T);
    }
    // variants (i)/(ii) default to the planar sign-condition examples
    const int n = 2;
    const double eps = get_num(params, "eps", 0.1);
    FrictionPotential G([](const Vec& x) { return 0.5 * x.squaredNorm(); },
                        [](const Vec& x) -> Vec { return x; });
    const int k = (name == "lienard_i") ? 1 : 2;
    auto h = remark33_field(k, eps);
    const auto probe_plan = build_remark33_example(k, eps).lienard_params;
    bp.sampling = probe_plan;
    bp.d = (k == 3) ? std::sqrt(3.0) : 1.0;
    const double amp = get_num(params, "forcing_amp", 1.0);
    return build_lienard(G, h, trig_forcing(n, T, amp),
                         trig_forcing_antiderivative(n, T, amp),
                         (k == 1) ? LienardVariant::I : LienardVariant::II, bp,
                         phi_from_config(config, n), T);
  }
  if (name.rfind("remark33_", 0) == 0) {
    const int k = name.back() - '0';
    const double eps = get_num(params, "eps", 0.1);
    return build_remark33_example(k, eps);
  }
  if (name == "blowup") {
    const double gamma = get_num(params, "gamma", 0.5);
    return make_blowup_scenario(gamma, phi_from_config(config, 1));
  }
  throw ConfigError("config: unknown scenario '" + name + "'");
}

SolverOptions solver_options_from_config(const json& config) {
  SolverOptions opt;
  if (config.contains("solver")) {
    opt.newton_tol = get_num(config.at("solver"), "newton_tol", opt.newton_tol);
    opt.max_iter = get_int(config.at("solver"), "max_iter", opt.max_iter);
  }
  return opt;
}

int mesh_size_from_config(const json& config) {
  if (config.contains("solver")) return get_int(config.at("solver"), "N", 256);
  return 256;
}

std::vector<double> lambda_schedule_from_config(const json& config) {
  int steps = 11;
  if (config.contains("solver")) steps = get_int(config.at("solver"), "lambda_steps", 11);
  if (steps < 2) throw ConfigError("config: solver.lambda_steps must be >= 2");
  return linspace(0.0, 1.0, steps);
}

VerifyOptions verify_options_from_config(const json& config, int n) {
  VerifyOptions opt = VerifyOptions::defaults(n);
  if (config.contains("sampling")) {
    const auto& sj = config.at("sampling");
    opt.time_nodes = get_int(sj, "time_nodes", opt.time_nodes);
    opt.boundary_dirs = get_int(sj, "boundary_dirs", opt.boundary_dirs);
    opt.sphere_dirs = get_int(sj, "sphere_dirs", opt.sphere_dirs);
    opt.face_samples = get_int(sj, "face_samples", opt.face_samples);
    opt.tangent_dirs = get_int(sj, "tangent_dirs", opt.tangent_dirs);
    if (sj.contains("y_cap")) opt.y_cap = get_num(sj, "y_cap", 10.0);
  }
  if (config.contains("seed")) opt.seed = config.at("seed").get<std::uint64_t>();
  return opt;
}

namespace {

const char* condition_citation(const std::string& id) {
  if (id == "hartman") return "Hartman-Knobloch theorem (sphere repulsivity)";
  if (id == "poincare_miranda") return "Poincare-Miranda theorem (face sign conditions)";
  if (id == "cond_Vprime") return "nonvanishing gradient on the level set";
  if (id == "cond_C") return "tangential Hessian positivity (condition C)";
  if (id == "H_V") return "bounding-function non-tangency inequality";
  if (id == "outer_normal") return "outer-normal field sign condition";
  if (id == "H_phi") return "coercivity of phi (H_phi)";
  if (id == "H_H") return "Lienard sign condition (H_H)";
  if (id == "H_H_plus") return "Lienard lower bound (H_H+)";
  if (id == "lienard_i") return "Lienard growth condition (i)";
  if (id == "lienard_ii") return "Lienard perturbed sign condition (ii)";
  if (id == "lienard_iii") return "Lienard componentwise sign condition (iii)";
  if (id == "villari") return "generalized Villari condition";
  if (id == "rayleigh_parallel") return "Rayleigh velocity field parallel to y";
  if (id == "rayleigh_bounded") return "Rayleigh drift bounded (g - grad G o phi)";
  if (id == "NH1") return "Nagumo-Hartman growth condition (NH1)";
  if (id == "NH2") return "Nagumo-Hartman growth condition (NH2)";
  if (id == "degree") return "degree-1 boundary certificate";
  if (id == "blowup_integrability") return "blow-up integrability hypothesis";
  if (id == "blowup_identity") return "blow-up differential identity";
  return "";
}

}  // namespace

std::string render_summary(const json& verify_report, const json* solve_report) {
  std::ostringstream os;
  os << "scenario: " << verify_report.value("scenario", "?") << "\n";
  os << "seed:     " << verify_report.value("seed", 0) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-20s %-18s %-14s %s\n", "condition", "verdict",
                "margin", "reference");
  os << line;
  os << std::string(86, '-') << "\n";
  if (verify_report.contains("conditions")) {
    for (const auto& c : verify_report.at("conditions")) {
      const std::string id = c.value("condition", "?");
      std::snprintf(line, sizeof(line), "%-20s %-18s %-14.6g %s\n", id.c_str(),
                    c.value("verdict", "?").c_str(), c.value("margin", 0.0),
                    condition_citation(id));
      os << line;
    }
  }
  if (verify_report.contains("degree")) {
    const auto& d = verify_report.at("degree");
    os << "\ndegree certificate: "
       << (d.value("certified", false) ? "=1 certified" : "not certified")
       << " (min field norm " << d.value("min_field_norm", 0.0) << ", "
       << d.value("boundary_samples", 0) << " boundary samples)\n";
  }
  if (verify_report.contains("convexity")) {
    os << "convexity: " << verify_report.at("convexity").value("status", "?") << "\n";
  }
  if (solve_report) {
    os << "\nsolve: continuation " << solve_report->value("continuation", "?")
       << ", residual " << solve_report->value("residual_norm", 0.0) << "\n";
    if (solve_report->contains("conclusion")) {
      const auto& c = solve_report->at("conclusion");
      os << "conclusion: contained = " << (c.value("contained", false) ? "yes" : "no")
         << " (margin " << c.value("containment_margin", 0.0) << "), derivative bound "
         << (c.value("derivative_bounded", false) ? "met" : "exceeded") << " (max speed "
         << c.value("max_speed", 0.0) << " vs K = " << c.value("nagumo_bound", 0.0)
         << ")\n";
    }
  }
  return os.str();
}

}  // namespace phibvp
