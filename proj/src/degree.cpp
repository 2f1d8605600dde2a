#include "phibvp/degree.hpp"

#include "phibvp/sampling.hpp"

#include <cmath>
#include <limits>

namespace phibvp {

int sign_degree_1d(const std::function<double(double)>& F, double a, double b,
                   double admissibility_tol) {
  const double fa = F(a);
  const double fb = F(b);
  if (std::abs(fa) <= admissibility_tol || std::abs(fb) <= admissibility_tol)
    throw AdmissibilityError("sign_degree_1d: endpoint value too close to zero");
  const int sa = fa > 0.0 ? 1 : -1;
  const int sb = fb > 0.0 ? 1 : -1;
  return (sb - sa) / 2;
}

namespace {

double angle_increment(const Vec& u, const Vec& v) {
  return std::atan2(u[0] * v[1] - u[1] * v[0], u.dot(v));
}

double winding_segment(const std::function<Vec(const Vec&)>& F, const Vec& a, const Vec& b,
                       const Vec& Fa, const Vec& Fb, double refine_tol,
                       double admissibility_tol, int depth) {
  const double inc = angle_increment(Fa, Fb);
  if (std::abs(inc) <= refine_tol) return inc;
  if (depth <= 0)
    throw AdmissibilityError("winding_number_2d: refinement budget exhausted");
  const Vec m = 0.5 * (a + b);
  const Vec Fm = F(m);
  if (Fm.norm() < admissibility_tol)
    throw AdmissibilityError("winding_number_2d: field vanishes on the boundary");
  return winding_segment(F, a, m, Fa, Fm, refine_tol, admissibility_tol, depth - 1) +
         winding_segment(F, m, b, Fm, Fb, refine_tol, admissibility_tol, depth - 1);
}

}  // namespace

int winding_number_2d(const std::function<Vec(const Vec&)>& F,
                      const std::vector<Vec>& polyline, double refine_tol,
                      double admissibility_tol) {
  if (polyline.size() < 3) throw InputError("winding_number_2d: need a closed polyline");
  std::vector<Vec> values;
  values.reserve(polyline.size());
  for (const auto& v : polyline) {
    Vec Fv = F(v);
    if (Fv.norm() < admissibility_tol)
      throw AdmissibilityError("winding_number_2d: field vanishes at a vertex");
    values.push_back(std::move(Fv));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < polyline.size(); ++i) {
    const std::size_t j = (i + 1) % polyline.size();
    total += winding_segment(F, polyline[i], polyline[j], values[i], values[j], refine_tol,
                             admissibility_tol, 40);
  }
  const double turns = total / (2.0 * M_PI);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-3)
    throw AdmissibilityError("winding_number_2d: accumulated angle is not an integer turn");
  return static_cast<int>(rounded);
}

DegreeCertificate degree_one_certificate(const std::function<Vec(const Vec&)>& field,
                                         const std::vector<Vec>& boundary, const Vec& P0,
                                         double admissibility_tol, int lambda_checks) {
  if (boundary.empty()) throw InputError("degree_one_certificate: empty boundary");
  DegreeCertificate cert;
  cert.method = DegreeCertificate::Method::BoundaryHomotopy;
  cert.boundary_samples = static_cast<int>(boundary.size());
  cert.min_field_norm = std::numeric_limits<double>::infinity();

  for (const auto& u : boundary) {
    const Vec ray = u - P0;
    if (!(ray.norm() > 0.0))
      throw InputError("degree_one_certificate: boundary point coincides with P0");
    const Vec fu = field(u);
    cert.min_field_norm = std::min(cert.min_field_norm, fu.norm());
    if (fu.dot(ray) < 0.0 || fu.norm() <= admissibility_tol) {
      cert.certified = false;
      cert.witness = u;
      cert.note = (fu.norm() <= admissibility_tol)
                      ? "field norm below admissibility tolerance"
                      : "inner product with u - P0 negative";
      return cert;
    }
    // homotopy admissibility along the lambda grid; the endpoints' inner
    // products are >= 0 with at least one strictly positive, but the mixed
    // field is checked explicitly where the product is exactly zero
    for (int k = 0; k <= lambda_checks; ++k) {
      const double lam = static_cast<double>(k) / lambda_checks;
      const Vec mixed = (1.0 - lam) * fu + lam * ray;
      if (mixed.norm() <= admissibility_tol) {
        cert.certified = false;
        cert.witness = u;
        cert.note = "convex homotopy to Id - P0 vanishes at lambda = " + std::to_string(lam);
        return cert;
      }
    }
  }
  cert.certified = true;
  cert.value = 1;
  cert.note = "=1 certified";
  return cert;
}

Vec average_field(const std::function<Vec(double, const Vec&)>& F_at_rest, double T,
                  const Vec& s, int quad_N) {
  if (quad_N < 2) throw InputError("average_field: quad_N must be >= 2");
  Vec acc = Vec::Zero(s.size());
  for (int j = 0; j < quad_N; ++j) acc += F_at_rest(T * j / quad_N, s);
  return acc / quad_N;
}

std::vector<Vec> circle_polyline(const Vec& c, double R, int count) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double th = 2.0 * M_PI * k / count;
    Vec p(2);
    p << c[0] + R * std::cos(th), c[1] + R * std::sin(th);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace phibvp
