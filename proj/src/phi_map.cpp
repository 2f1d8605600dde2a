#include "phibvp/phi_map.hpp"

#include "phibvp/rootfind.hpp"
#include "phibvp/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace phibvp {

PhiMap PhiMap::p_laplacian(int n, double p) {
  if (n < 1) throw InputError("PhiMap: dimension must be positive");
  if (!(p > 1.0)) throw InputError("PhiMap: p-Laplacian requires p > 1");
  PhiMap m;
  m.n_ = n;
  m.kind_ = Kind::PLaplacian;
  m.p_ = p;
  return m;
}

PhiMap PhiMap::radial(int n, std::function<double(const Vec&)> A, double inverse_tol) {
  if (n < 1) throw InputError("PhiMap: dimension must be positive");
  if (!A) throw InputError("PhiMap: radial profile missing");
  PhiMap m;
  m.n_ = n;
  m.kind_ = Kind::Radial;
  m.A_ = std::move(A);
  m.inverse_tol_ = inverse_tol;
  return m;
}

PhiMap PhiMap::general(int n, std::function<Vec(const Vec&)> forward) {
  if (n < 1) throw InputError("PhiMap: dimension must be positive");
  if (!forward) throw InputError("PhiMap: forward map missing");
  PhiMap m;
  m.n_ = n;
  m.kind_ = Kind::General;
  m.forward_ = std::move(forward);
  return m;
}

double PhiMap::p() const {
  if (kind_ != Kind::PLaplacian) throw InputError("PhiMap: p() only for p-Laplacian kind");
  return p_;
}

Vec PhiMap::apply(const Vec& xi) const {
  if (xi.size() != n_) throw InputError("PhiMap::apply: dimension mismatch");
  if (!xi.allFinite()) throw EvaluationError("PhiMap::apply: non-finite argument");
  Vec out;
  switch (kind_) {
    case Kind::PLaplacian: {
      const double r = xi.norm();
      out = (r == 0.0) ? Vec::Zero(n_) : Vec(std::pow(r, p_ - 2.0) * xi);
      break;
    }
    case Kind::Radial: {
      if (xi.norm() == 0.0) {
        out = Vec::Zero(n_);
      } else {
        const double a = A_(xi);
        if (!(a > 0.0)) throw EvaluationError("PhiMap::apply: radial profile not positive");
        out = a * xi;
      }
      break;
    }
    case Kind::General:
      out = forward_(xi);
      break;
  }
  if (!out.allFinite()) throw EvaluationError("PhiMap::apply: non-finite value");
  return out;
}

Vec PhiMap::invert(const Vec& eta) const {
  if (eta.size() != n_) throw InputError("PhiMap::invert: dimension mismatch");
  if (!eta.allFinite()) throw EvaluationError("PhiMap::invert: non-finite argument");
  const double rho = eta.norm();
  if (rho == 0.0) return Vec::Zero(n_);
  switch (kind_) {
    case Kind::PLaplacian: {
      // conjugate exponent: phi_p^{-1} = phi_q with q = p/(p-1)
      const double q = p_ / (p_ - 1.0);
      return std::pow(rho, q - 2.0) * eta;
    }
    case Kind::Radial: {
      const Vec d = eta / rho;
      auto ray = [&](double r) { return r <= 0.0 ? -rho : r * A_(r * d) - rho; };
      auto bracket = expand_bracket_upward(ray, 0.0, 1.0);
      if (!bracket)
        throw InversionError("PhiMap::invert: no bracket found (phi not surjective?)");
      const double r =
          solve_bracketed(ray, bracket->first, bracket->second, inverse_tol_,
                          inverse_tol_ * (1.0 + rho));
      return r * d;
    }
    case Kind::General:
      throw InversionError("PhiMap::invert: general kind has no inverse strategy");
  }
  return Vec::Zero(n_);
}

double PhiMap::radial_scale(const Vec& xi) const {
  switch (kind_) {
    case Kind::PLaplacian:
      return std::pow(xi.norm(), p_ - 2.0);
    case Kind::Radial:
      return A_(xi);
    case Kind::General:
      throw InputError("PhiMap::radial_scale: not a radial operator");
  }
  return 0.0;
}

double PhiMap::apply_scalar(double s) const {
  Vec xi = Vec::Constant(1, s);
  if (n_ != 1) throw InputError("PhiMap::apply_scalar: operator is not scalar");
  return apply(xi)[0];
}

double PhiMap::invert_scalar(double v) const {
  if (n_ != 1) throw InputError("PhiMap::invert_scalar: operator is not scalar");
  return invert(Vec::Constant(1, v))[0];
}

double PhiMap::inverse_radius_bound(double bound, int dir_samples) const {
  if (!(bound >= 0.0)) throw InputError("inverse_radius_bound: bound must be >= 0");
  if (bound == 0.0) return 0.0;
  if (kind_ == Kind::PLaplacian) return std::pow(bound, 1.0 / (p_ - 1.0));
  if (kind_ == Kind::General)
    throw InputError("inverse_radius_bound: general kind has no inverse strategy");
  double worst = 0.0;
  for (const auto& d : unit_directions(n_, dir_samples)) {
    worst = std::max(worst, invert(bound * d).norm());
  }
  return worst;
}

double p_laplacian_M_eta(double p, double eta) {
  if (!(p > 1.0) || !(eta > 0.0)) throw InputError("p_laplacian_M_eta: p > 1, eta > 0");
  // d/dr (eta r - r^p) = 0  at  r = (eta/p)^(1/(p-1))
  const double r = std::pow(eta / p, 1.0 / (p - 1.0));
  return std::max(0.0, eta * r - std::pow(r, p));
}

HPhiResult check_h_phi(const PhiMap& map, double eta, const std::vector<double>& radii,
                       int directions) {
  if (!(eta > 0.0)) throw InputError("check_h_phi: eta must be positive");
  if (radii.size() < 2) throw InputError("check_h_phi: need a radius sweep");
  const double span = *std::max_element(radii.begin(), radii.end()) /
                      *std::min_element(radii.begin(), radii.end());
  if (span < 1e3) throw InputError("check_h_phi: radii must span >= 3 decades");

  HPhiResult res;
  const auto dirs = unit_directions(map.dimension(), directions);
  std::vector<double> radii_sorted = radii;
  std::sort(radii_sorted.begin(), radii_sorted.end());

  std::vector<double> deficit_by_radius;
  deficit_by_radius.reserve(radii_sorted.size());
  double worst_deficit = 0.0;
  for (double r : radii_sorted) {
    double deficit_here = -std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
      const Vec xi = r * d;
      const double pairing = map.apply(xi).dot(xi);
      if (pairing <= 0.0 && r > 0.0) {
        res.verdict = Verdict::Violated;
        res.witness = xi;
        res.M_eta = 0.0;
        return res;
      }
      deficit_here = std::max(deficit_here, eta * r - pairing);
    }
    deficit_by_radius.push_back(deficit_here);
    worst_deficit = std::max(worst_deficit, deficit_here);
  }
  res.M_eta = std::max(0.0, worst_deficit);

  // coercivity trend: the deficit must be non-increasing over the largest
  // sampled decade
  const double r_max = radii_sorted.back();
  bool trend_ok = true;
  double prev = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (std::size_t i = 0; i < radii_sorted.size(); ++i) {
    if (radii_sorted[i] < r_max / 10.0) continue;
    if (!first && deficit_by_radius[i] > prev + 1e-12 * (1.0 + std::abs(prev)))
      trend_ok = false;
    prev = deficit_by_radius[i];
    first = false;
  }
  res.verdict = trend_ok ? Verdict::HoldsAtSamples : Verdict::Inconclusive;
  return res;
}

}  // namespace phibvp
