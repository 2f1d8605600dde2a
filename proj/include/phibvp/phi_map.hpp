#pragma once

#include "phibvp/types.hpp"

#include <functional>
#include <vector>

namespace phibvp {

// ---------------------------------------------------------------------------
// A homeomorphism phi of R^n with phi(0) = 0, evaluated forward and inverse.
//
// The radial form phi(xi) = A(xi) xi with A > 0 off the origin covers every
// vector p-Laplacian: A(xi) = ||xi||^(p-2). For a valid homeomorphism the ray
// map r -> r A(r d) is an increasing bijection of [0, inf), which is what the
// bracketing inverse relies on; no monotonicity of phi itself is assumed.
// ---------------------------------------------------------------------------
class PhiMap {
 public:
  enum class Kind { PLaplacian, Radial, General };

  /// Placeholder (dimension 0); any evaluation throws until a factory-made
  /// map is assigned.
  PhiMap() = default;

  /// p-Laplacian phi_p(xi) = ||xi||^(p-2) xi. Requires p > 1 (phi_p fails to
  /// be a homeomorphism onto R^n otherwise).
  static PhiMap p_laplacian(int n, double p);

  /// Radial operator from a scalar profile A(xi) > 0 (xi != 0). The inverse
  /// solves r A(r d) = ||eta|| along d = eta/||eta|| by bracketed root-finding
  /// to `inverse_tol`.
  static PhiMap radial(int n, std::function<double(const Vec&)> A,
                       double inverse_tol = 1e-12);

  /// Arbitrary forward map (no inverse available).
  static PhiMap general(int n, std::function<Vec(const Vec&)> forward);

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  bool is_radial() const { return kind_ != Kind::General; }
  double p() const;  // PLaplacian only
  double inverse_tolerance() const { return inverse_tol_; }

  Vec apply(const Vec& xi) const;
  Vec operator()(const Vec& xi) const { return apply(xi); }

  /// phi^{-1}. Closed form for the p-Laplacian (conjugate exponent
  /// q = p/(p-1)); scalar root-find along the ray for general radial kinds.
  /// Throws InversionError when no bracket is found (phi not surjective as
  /// given) and for Kind::General.
  Vec invert(const Vec& eta) const;

  /// A(xi) for radial kinds; requires xi != 0.
  double radial_scale(const Vec& xi) const;

  // scalar (n = 1) conveniences
  double apply_scalar(double s) const;
  double invert_scalar(double v) const;

  /// sup{ ||xi|| : ||phi(xi)|| <= bound }, i.e. the derivative bound implied
  /// by a bound on ||phi(x')||. Exact for the p-Laplacian; maximized over
  /// sampled ray directions otherwise.
  double inverse_radius_bound(double bound, int dir_samples = 64) const;

 private:
  int n_ = 0;
  Kind kind_ = Kind::General;
  double p_ = 2.0;
  double inverse_tol_ = 1e-12;
  std::function<double(const Vec&)> A_;
  std::function<Vec(const Vec&)> forward_;
};

/// Analytic M_eta for the p-Laplacian: the maximum of
/// eta ||xi|| - <phi_p(xi), xi> = eta r - r^p over r >= 0.
double p_laplacian_M_eta(double p, double eta);

struct HPhiResult {
  double M_eta = 0.0;  // max over samples of eta ||xi|| - <phi(xi), xi>, clamped at 0
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Vec> witness;  // point with <phi(xi), xi> <= 0, if any
};

/// Samples the coercivity hypothesis <phi(xi), xi> >= eta ||xi|| - M_eta.
/// Radii should span at least three orders of magnitude; the verdict is
/// holds_at_samples when the deficit is non-increasing across the largest
/// sampled decade (a trend heuristic, reported as such).
HPhiResult check_h_phi(const PhiMap& map, double eta, const std::vector<double>& radii,
                       int directions);

}  // namespace phibvp
