#include "phibvp/apriori.hpp"

#include "phibvp/quadrature.hpp"
#include "phibvp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phibvp {

double lemma21_bound(double M0, double M1, double p, double T) {
  if (!(M0 >= 0.0)) throw InputError("lemma21_bound: M0 must be >= 0");
  if (!(M1 > 0.0)) throw InputError("lemma21_bound: M1 must be > 0");
  if (!(T > 0.0)) throw InputError("lemma21_bound: T must be > 0");
  if (!(p >= 1.0)) throw InputError("lemma21_bound: p must be in [1, inf]");
  const double expo = std::isinf(p) ? 1.0 : (p - 1.0) / p;
  return M0 + std::pow(T, expo) * M1;
}

AprioriBound make_apriori_bound(double M0, double M1, double p, double T) {
  AprioriBound b;
  b.M0 = M0;
  b.M1 = M1;
  b.p = p;
  b.T = T;
  b.K = lemma21_bound(M0, M1, p, T);
  return b;
}

double discrete_lp_norm(const Mat& dz, double T, double p) {
  const int N = static_cast<int>(dz.rows());
  if (N < 1) throw InputError("discrete_lp_norm: empty trajectory");
  if (std::isinf(p)) {
    double m = 0.0;
    for (int j = 0; j < N; ++j) m = std::max(m, dz.row(j).norm());
    return m;
  }
  // periodic trapezoid of ||z'||^p
  const double h = T / N;
  double acc = 0.0;
  for (int j = 0; j < N; ++j) acc += std::pow(dz.row(j).norm(), p);
  return std::pow(acc * h, 1.0 / p);
}

HypothesisReport verify_family_bound(const std::vector<SampledTrajectory>& family,
                                     double M0, double p, double M1, double T,
                                     const std::vector<Vec>& omegas) {
  HypothesisReport rep;
  rep.condition_id = "lemma21_family_bound";
  if (family.empty()) throw InputError("verify_family_bound: empty family");
  if (omegas.empty()) throw InputError("verify_family_bound: no directions");
  const double K = lemma21_bound(M0, M1, p, T);
  const double tol = 1e-12 * (1.0 + K);

  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t zi = 0; zi < family.size(); ++zi) {
    const auto& traj = family[zi];
    const int N = static_cast<int>(traj.z.rows());
    // hypothesis 1: every direction sees a small projection somewhere
    for (const auto& omega : omegas) {
      double proj_min = std::numeric_limits<double>::infinity();
      for (int j = 0; j < N; ++j)
        proj_min = std::min(proj_min, std::abs(traj.z.row(j).dot(omega)));
      if (proj_min > M0 + tol) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "hypothesis 1 failed (projection stays above M0); bound inapplicable";
        Witness w;
        w.x = omega;
        w.y = Vec::Constant(1, proj_min);
        rep.witness = w;
        return rep;
      }
    }
    // hypothesis 2: L^p budget of the derivative
    const double lp = discrete_lp_norm(traj.dz, T, p);
    if (lp > M1 + tol * (1.0 + M1)) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = "hypothesis 2 failed (derivative L^p norm above M1)";
      Witness w;
      w.y = Vec::Constant(1, lp);
      rep.witness = w;
      return rep;
    }
    // conclusion
    double sup = 0.0;
    int arg = 0;
    for (int j = 0; j < N; ++j) {
      const double nz = traj.z.row(j).norm();
      if (nz > sup) {
        sup = nz;
        arg = j;
      }
    }
    const double slack = K - sup;
    if (slack < worst_slack) worst_slack = slack;
    if (sup > K + tol) {
      rep.verdict = Verdict::Violated;
      Witness w;
      w.t = T * arg / N;
      w.x = traj.z.row(arg);
      rep.witness = w;
      rep.margin = slack;
      rep.note = "trajectory " + std::to_string(zi) + " exceeds K";
      return rep;
    }
  }
  rep.verdict = Verdict::HoldsAtSamples;
  rep.margin = worst_slack;
  return rep;
}

namespace {

// successive decade contributions of a positive integrand from lo upward;
// returns partial integrals at the checkpoints and the final ratio
std::pair<std::vector<double>, double> decade_partials(
    const std::function<double(double)>& integrand, double lo, double hi, double tol) {
  std::vector<double> checkpoints;
  for (double x = lo; x < hi; x *= 10.0) checkpoints.push_back(x);
  checkpoints.push_back(hi);
  std::vector<double> partials;
  std::vector<double> contribs;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < checkpoints.size(); ++k) {
    const double c =
        adaptive_simpson(integrand, checkpoints[k], checkpoints[k + 1], tol);
    contribs.push_back(c);
    acc += c;
    partials.push_back(acc);
  }
  double ratio = 0.0;
  if (contribs.size() >= 2) {
    const double prev = contribs[contribs.size() - 2];
    ratio = (prev > 0.0) ? contribs.back() / prev : 0.0;
  }
  return {partials, ratio};
}

}  // namespace

Nh1Result check_nh1(const VectorField& f, const std::function<double(double)>& eta,
                    double R, const std::vector<double>& t_samples,
                    const std::vector<Vec>& x_samples, const std::vector<Vec>& y_samples,
                    double Xi_max) {
  Nh1Result res;
  res.report.condition_id = "NH1";
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;
  for (const auto& x : x_samples) {
    if (x.norm() > R * (1.0 + 1e-12)) continue;
    for (const auto& y : y_samples) {
      const double envelope = eta(y.norm());
      if (!(envelope > 0.0)) throw InputError("check_nh1: eta must be positive");
      for (double t : t_samples) {
        const double slack = envelope - f.eval(t, x, y).norm();
        if (slack < margin) {
          margin = slack;
          worst.t = t;
          worst.x = x;
          worst.y = y;
        }
      }
    }
  }
  res.report.margin = margin;
  res.report.verdict = (margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
  if (res.report.verdict == Verdict::Violated) res.report.witness = worst;

  auto [partials, ratio] =
      decade_partials([&](double s) { return s / eta(s); }, 1.0, Xi_max, 1e-10);
  res.partial_integrals = std::move(partials);
  res.integral_divergent = ratio > 0.5;
  if (!res.integral_divergent)
    res.report.note = "partial integrals of s/eta(s) saturate; (NH1) integral condition fails";
  return res;
}

Nh1Result check_nh1(const VectorField& f, const NagumoGrowthSpec& spec,
                    const std::vector<double>& t_samples,
                    const std::vector<Vec>& x_samples, const std::vector<Vec>& y_samples,
                    double Xi_max) {
  return check_nh1(f, spec.eta, spec.R, t_samples, x_samples, y_samples, Xi_max);
}

HypothesisReport check_nh2(const VectorField& f, const NagumoGrowthSpec& spec,
                           const std::vector<double>& t_samples,
                           const std::vector<Vec>& x_samples,
                           const std::vector<Vec>& y_samples) {
  return check_nh2(f, spec.alpha, spec.beta, spec.R, t_samples, x_samples, y_samples);
}

HypothesisReport check_nh2(const VectorField& f, double alpha, double beta, double R,
                           const std::vector<double>& t_samples,
                           const std::vector<Vec>& x_samples,
                           const std::vector<Vec>& y_samples) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InputError("check_nh2: constants must be >= 0");
  HypothesisReport rep;
  rep.condition_id = "NH2";
  double margin = std::numeric_limits<double>::infinity();
  Witness worst;
  for (const auto& x : x_samples) {
    if (x.norm() > R * (1.0 + 1e-12)) continue;
    for (const auto& y : y_samples) {
      for (double t : t_samples) {
        const Vec fv = f.eval(t, x, y);
        const double rhs = 2.0 * alpha * (x.dot(fv) + y.squaredNorm()) + beta;
        const double slack = rhs - fv.norm();
        if (slack < margin) {
          margin = slack;
          worst.t = t;
          worst.x = x;
          worst.y = y;
        }
      }
    }
  }
  rep.margin = margin;
  rep.verdict = (margin >= 0.0) ? Verdict::HoldsAtSamples : Verdict::Violated;
  if (rep.verdict == Verdict::Violated) rep.witness = worst;
  return rep;
}

std::pair<double, double> blowup_solution(const BlowUpSpec& spec, double t) {
  if (spec.phi.dimension() != 1) throw InputError("blowup_solution: phi must be scalar");
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("blowup_solution: t must lie in [0, 1)");
  auto speed = [&](double s) { return spec.phi.invert_scalar(std::pow(1.0 - s, -spec.gamma)); };
  const double dx = speed(t);
  if (t == 0.0) return {0.0, dx};

  // dyadic panels toward the singular endpoint s = 1, adaptive on each
  std::vector<double> breaks{0.0};
  double b = 0.5;
  while (b < t) {
    breaks.push_back(b);
    b = 0.5 * (1.0 + b);
  }
  breaks.push_back(t);
  double x = 0.0;
  const double panel_tol = spec.quad_tol / static_cast<double>(breaks.size());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    x += adaptive_simpson(speed, breaks[k], breaks[k + 1], panel_tol);
  return {x, dx};
}

IntegrabilityResult check_blowup_integrability(const PhiMap& scalar_phi, double gamma,
                                               double Xi_max) {
  if (scalar_phi.dimension() != 1)
    throw InputError("check_blowup_integrability: phi must be scalar");
  if (!(gamma > 0.0)) throw InputError("check_blowup_integrability: gamma must be > 0");
  IntegrabilityResult res;
  const double expo = (1.0 + gamma) / gamma;
  auto integrand = [&](double xi) {
    return scalar_phi.invert_scalar(xi) * std::pow(xi, -expo);
  };
  auto [partials, ratio] = decade_partials(integrand, 1.0, Xi_max, 1e-12);
  res.partials = std::move(partials);
  res.last_ratio = ratio;
  res.convergent = ratio <= 0.5;
  return res;
}

}  // namespace phibvp
