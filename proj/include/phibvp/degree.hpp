#pragma once

#include "phibvp/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phibvp {

// Brouwer degree evidence at desk scale: exact values in dimensions one and
// two, and a boundary certificate for degree 1 in any dimension via the
// convex homotopy to the translated identity.

/// (sign F(b) - sign F(a)) / 2; throws AdmissibilityError when an endpoint
/// value is within admissibility_tol of zero.
int sign_degree_1d(const std::function<double(double)>& F, double a, double b,
                   double admissibility_tol = 1e-8);

/// Winding number of a planar field along a closed polyline: principal-branch
/// angle increments, with segments adaptively bisected whenever an increment
/// exceeds refine_tol. Throws AdmissibilityError on a near-zero field value
/// or when the accumulated angle is not within 1e-3 * 2 pi of an integer
/// multiple.
int winding_number_2d(const std::function<Vec(const Vec&)>& F,
                      const std::vector<Vec>& polyline, double refine_tol = M_PI / 2.0,
                      double admissibility_tol = 1e-8);

struct DegreeCertificate {
  enum class Method { Sign1d, Winding2d, BoundaryHomotopy };
  Method method = Method::BoundaryHomotopy;
  bool certified = false;          // degree 1 certified by the homotopy argument
  std::optional<int> value;        // exact value when computed
  int boundary_samples = 0;
  double min_field_norm = 0.0;
  std::optional<Vec> witness;      // sample breaking the certificate, if any
  std::string note;
};

/// Certifies d_B(field, G, 0) = 1 from boundary evidence: at every sampled
/// u in the boundary, <field(u), u - P0> >= 0 and ||field(u)|| stays above
/// admissibility_tol, so the convex homotopy (1-lambda) field + lambda (Id -
/// P0) is nonvanishing at the samples (checked on a lambda grid as well).
DegreeCertificate degree_one_certificate(const std::function<Vec(const Vec&)>& field,
                                         const std::vector<Vec>& boundary, const Vec& P0,
                                         double admissibility_tol = 1e-8,
                                         int lambda_checks = 11);

/// Time average (1/T) int_0^T F(t, s, 0) dt by the periodic rectangle rule
/// with quad_N nodes (spectrally accurate for smooth periodic integrands).
Vec average_field(const std::function<Vec(double, const Vec&)>& F_at_rest, double T,
                  const Vec& s, int quad_N);

/// Closed polyline of count vertices on the circle of radius R about c.
std::vector<Vec> circle_polyline(const Vec& c, double R, int count);

}  // namespace phibvp
