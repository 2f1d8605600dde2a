#include "phibvp/bounding.hpp"

#include "phibvp/rootfind.hpp"
#include "phibvp/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace phibvp;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

BoundingFn quartic_1d() {
  // V(x) = x^4 - x^2, whose zero level set {-1, 0, 1} strictly contains the
  // boundary of [V <= 0]
  return BoundingFn(ScalarField([](const Vec& x) {
                      const double s = x[0];
                      return s * s * s * s - s * s;
                    }),
                    0.0);
}

const BoundingFn kPeanut = BoundingFn::peanut(1.0, 1.0, 0.1);

}  // namespace

TEST_CASE("scalar field derivatives") {
  // analytic gradient cross-checked by the central-difference fallback
  ScalarField f([](const Vec& x) { return std::sin(x[0]) * x[1] + 0.5 * x[1] * x[1]; },
                [](const Vec& x) {
                  return Vec(v2(std::cos(x[0]) * x[1], std::sin(x[0]) + x[1]));
                });
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int k = 0; k < 64; ++k) {
    const Vec x = v2(gauss(rng), gauss(rng));
    const Vec g = f.grad(x);
    CHECK((f.grad_fd(x) - g).norm() <= 1e-6 * (1.0 + g.norm()));
  }
  // Hessian symmetry after symmetrization, fd route
  ScalarField g([](const Vec& x) { return x[0] * x[0] * x[1] + std::cos(x[1]); });
  const Mat H = g.hess(v2(0.7, -0.3));
  CHECK((H - H.transpose()).norm() == 0.0);
  CHECK(H(0, 1) == doctest::Approx(2.0 * 0.7).epsilon(1e-4));
}

TEST_CASE("boundary sampling") {
  SUBCASE("unit sphere") {
    const auto V = BoundingFn::sphere(2, 1.0);
    const auto bs = sample_boundary(V, Vec::Zero(2), 32, 1e-10);
    CHECK(bs.points.size() == 32);
    for (const auto& u : bs.points) CHECK(std::abs(u.norm() - 1.0) <= 1e-9);
  }
  SUBCASE("quartic level set is met at the sublevel boundary, not at 0") {
    const auto V = quartic_1d();
    const auto bs = sample_boundary(V, Vec::Constant(1, 0.5), 2, 1e-12);
    REQUIRE(bs.points.size() == 2);
    CHECK(bs.points[0][0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(bs.points[1][0] == doctest::Approx(-1.0).epsilon(1e-8));
  }
  SUBCASE("peanut boundary along +e1") {
    // solve a^4/4 - a^2 = 0.1 independently: a^2 = 2 + sqrt(4.4)
    const double a = std::sqrt(2.0 + std::sqrt(4.4));
    const auto bs = sample_boundary(kPeanut, v2(1.0, 0.0), 4, 1e-12);
    bool found = false;
    for (const auto& u : bs.points)
      if (u[1] == 0.0 && u[0] > 0.0) {
        CHECK(u[0] == doctest::Approx(a).epsilon(1e-9));
        found = true;
      }
    CHECK(found);
    CHECK(a == doctest::Approx(2.024258).epsilon(1e-6));
  }
  SUBCASE("no crossing raises BoundarySamplingError") {
    BoundingFn V(ScalarField([](const Vec& x) { return -1.0 / (1.0 + x.squaredNorm()); }),
                 0.0);
    CHECK_THROWS_AS(sample_boundary(V, Vec::Zero(2), 16, 1e-10, 50.0),
                    BoundarySamplingError);
  }
  SUBCASE("interior point must be interior") {
    CHECK_THROWS_AS(sample_boundary(BoundingFn::sphere(2, 1.0), v2(2.0, 0.0), 8, 1e-10),
                    InputError);
  }
}

TEST_CASE("gradient nonvanishing on the level set") {
  const auto V = BoundingFn::sphere(2, 1.0);
  const auto bs = sample_boundary(V, Vec::Zero(2), 32, 1e-10);
  auto rep = check_grad_nonvanishing(V, bs.points, 1e-8);
  CHECK(rep.holds());
  CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-9));

  // the quartic's interior critical point of the level set, injected by hand
  const auto Vq = quartic_1d();
  std::vector<Vec> pts{Vec::Constant(1, 1.0), Vec::Constant(1, 0.0)};
  rep = check_grad_nonvanishing(Vq, pts, 1e-8);
  CHECK(rep.violated());
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->x[0] == 0.0);

  const auto bp = sample_boundary(kPeanut, v2(1.0, 0.0), 64, 1e-10);
  rep = check_grad_nonvanishing(kPeanut, bp.points, 1e-8);
  CHECK(rep.holds());
  CHECK(rep.margin > 0.1);  // numerically verified floor on ||V'||

  CHECK_THROWS_AS(check_grad_nonvanishing(Vq, {}, 1e-8), InputError);
}

TEST_CASE("tangent basis") {
  SUBCASE("axis-aligned and diagonal gradients in the plane") {
    Mat Q = tangent_basis(v2(0.0, 2.0));
    REQUIRE(Q.cols() == 1);
    CHECK(std::abs(std::abs(Q(0, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(Q(1, 0)) < 1e-14);

    Q = tangent_basis(v2(1.0, 1.0));
    CHECK(std::abs(Q(0, 0) + Q(1, 0)) < 1e-14);  // proportional to (1,-1)
    CHECK(Q.col(0).norm() == doctest::Approx(1.0));
  }
  SUBCASE("spanning the y-z plane") {
    Vec g = Vec::Zero(3);
    g[0] = 1.0;
    const Mat Q = tangent_basis(g);
    REQUIRE(Q.cols() == 2);
    CHECK((Q.transpose() * Q - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((Q.transpose() * g).norm() < 1e-12);
  }
  SUBCASE("orthonormality property at random gradients") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int n : {2, 3, 5}) {
      for (int k = 0; k < 40; ++k) {
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = gauss(rng);
        if (g.norm() < 1e-8) continue;
        const Mat Q = tangent_basis(g);
        CHECK((Q.transpose() * Q - Mat::Identity(n - 1, n - 1)).norm() < 1e-12);
        CHECK((Q.transpose() * g).norm() <= 1e-12 * g.norm());
      }
    }
  }
  CHECK_THROWS_AS(tangent_basis(Vec::Zero(2)), InputError);
}

TEST_CASE("condition (C): tangential Hessian positivity") {
  SUBCASE("sphere: projected Hessian is the identity") {
    const auto V = BoundingFn::sphere(3, 2.0);
    Vec u = Vec::Zero(3);
    u[1] = 2.0;
    const auto res = check_condition_C(V, u, 1e-9);
    CHECK(res.verdict == Verdict::HoldsAtSamples);
    CHECK(res.min_tangent_eig == doctest::Approx(1.0));
  }
  SUBCASE("peanut waist: tangent eigenvalue -2") {
    const auto res = check_condition_C(kPeanut, v2(0.0, std::sqrt(0.1)), 1e-9);
    CHECK(res.verdict == Verdict::Violated);
    CHECK(res.min_tangent_eig == doctest::Approx(-2.0).epsilon(1e-9));
  }
  SUBCASE("ellipse: positive definite quadratic stays positive") {
    Mat Q = Mat::Zero(2, 2);
    Q(0, 0) = 0.5;
    Q(1, 1) = 2.0;
    const auto V = BoundingFn::quadratic_form(Q, 1.0);
    const auto bs = sample_boundary(V, Vec::Zero(2), 32, 1e-10);
    for (const auto& u : bs.points) {
      const auto res = check_condition_C(V, u, 1e-9);
      CHECK(res.verdict == Verdict::HoldsAtSamples);
      CHECK(res.min_tangent_eig > 0.0);
    }
  }
  SUBCASE("invariance under positive rescaling of V") {
    for (double alpha : {0.2, 5.0}) {
      BoundingFn scaled(ScalarField([alpha](const Vec& x) {
                          return alpha * (std::pow(x[0], 4) / 4.0 - x[0] * x[0] +
                                          x[1] * x[1] - 0.1);
                        }),
                        0.0);
      const Vec u = v2(0.0, std::sqrt(0.1));
      const auto base = check_condition_C(kPeanut, u, 1e-9);
      const auto res = check_condition_C(scaled, u, 1e-9);
      CHECK(res.verdict == base.verdict);
      CHECK(res.min_tangent_eig * base.min_tangent_eig > 0.0);  // same sign
    }
  }
  CHECK_THROWS_AS(check_condition_C(BoundingFn::sphere(2, 1.0), Vec::Zero(2), 1e-9),
                  GradientVanishedError);
}

TEST_CASE("non-tangency inequality (H_V)") {
  const auto phi3 = PhiMap::p_laplacian(2, 3.0);
  const auto V = BoundingFn::sphere(2, 1.0);
  const auto boundary = sample_boundary(V, Vec::Zero(2), 64, 1e-10).points;

  SUBCASE("identity-homotopy field: expression = A(y)||y||^2 + ||u||^2") {
    auto fam = HomotopyFamily::convex(
        2, 1.0, [](double, const Vec& x, const Vec&) { return x; },
        [](const Vec& x, const Vec&) { return x; });
    const auto opt = HVOptions::defaults(1.0, 2.0);
    const auto rep = check_HV(V, fam, phi3, boundary, opt);
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("gradient homotopy restores strictness through (1 - lambda)||V'||") {
    // f orthogonal to V' so the margin comes from the gradient term alone
    auto fam = HomotopyFamily::convex(
        2, 1.0, [](double, const Vec& x, const Vec&) { return Vec(v2(-x[1], x[0])); },
        [&V](const Vec& x, const Vec&) { return V.grad(x); });
    const auto opt = HVOptions::defaults(1.0, 2.0);
    const double lambda_max =
        *std::max_element(opt.lambda_grid.begin(), opt.lambda_grid.end());
    const auto rep = check_HV(V, fam, phi3, boundary, opt);
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(1.0 - lambda_max).epsilon(1e-6));
  }
  SUBCASE("attractive field violates near lambda = 1") {
    auto fam = HomotopyFamily::convex(
        2, 1.0, [](double, const Vec& x, const Vec&) { return Vec(-x); },
        [](const Vec& x, const Vec&) { return x; });
    const auto opt = HVOptions::defaults(1.0, 2.0);
    const auto rep = check_HV(V, fam, phi3, boundary, opt);
    CHECK(rep.violated());
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->lambda > 0.5);
    CHECK(rep.margin <= -0.99);
  }
}

TEST_CASE("Hartman's condition on the sphere") {
  const std::vector<double> t_grid = linspace(0.0, 1.0, 64);
  SUBCASE("f = x holds with margin R^2 for every R") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    for (double R : {0.5, 1.0, 2.0, 7.0}) {
      const auto rep = check_hartman(f, R, t_grid, 64);
      CHECK(rep.holds());
      CHECK(rep.margin == doctest::Approx(R * R).epsilon(1e-12));
    }
  }
  SUBCASE("forced field keeps margin R^2 - R max||c||") {
    auto f = VectorField::time_dependent(2, 1.0, [](double t, const Vec& x) {
      return Vec(x - v2(std::cos(2.0 * M_PI * t), std::sin(2.0 * M_PI * t)));
    });
    const auto rep = check_hartman(f, 2.0, t_grid, 256);
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("f = -x violated") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return Vec(-x); });
    const auto rep = check_hartman(f, 1.0, t_grid, 32);
    CHECK(rep.violated());
    REQUIRE(rep.witness.has_value());
    CHECK(f.eval(rep.witness->t, rep.witness->x).dot(rep.witness->x) < 0.0);
  }
}

TEST_CASE("Poincare-Miranda face conditions") {
  const std::vector<double> t_grid = linspace(0.0, 1.0, 64);
  SUBCASE("cubic minus cosine on [-2, 2]") {
    auto f = VectorField::time_dependent(1, 1.0, [](double t, const Vec& x) {
      return Vec(Vec::Constant(1, std::pow(x[0], 3) - std::cos(2.0 * M_PI * t)));
    });
    BoxSet box{Vec::Constant(1, -2.0), Vec::Constant(1, 2.0)};
    const auto rep = check_poincare_miranda(f, box, t_grid, 8);
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(7.0).epsilon(1e-12));
  }
  SUBCASE("identity field on the symmetric cube") {
    auto f = VectorField::autonomous(3, 1.0, [](const Vec& x) { return x; });
    BoxSet box{Vec::Constant(3, -1.0), Vec::Constant(3, 1.0)};
    const auto rep = check_poincare_miranda(f, box, {0.0}, 5);
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(1.0));
  }
  SUBCASE("reversed field violated on every face") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return Vec(-x); });
    BoxSet box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)};
    const auto rep = check_poincare_miranda(f, box, {0.0}, 5);
    CHECK(rep.violated());
    CHECK(rep.margin == doctest::Approx(-1.0));
  }
  SUBCASE("degenerate box rejected") {
    auto f = VectorField::autonomous(1, 1.0, [](const Vec& x) { return x; });
    BoxSet box{Vec::Constant(1, 1.0), Vec::Constant(1, 1.0)};
    CHECK_THROWS_AS(check_poincare_miranda(f, box, {0.0}, 4), InputError);
  }
}

TEST_CASE("outer normal fields") {
  const std::vector<double> t_grid = linspace(0.0, 1.0, 16);
  SUBCASE("ball with nu = u") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    std::vector<std::pair<Vec, Vec>> normals;
    for (const auto& d : unit_directions(2, 32)) normals.emplace_back(1.5 * d, d);
    const auto rep = check_outer_normal(f, normals, t_grid, Vec::Zero(2));
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("box faces with axis normals reproduce the sign conditions") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    std::vector<std::pair<Vec, Vec>> normals;
    for (int i = 0; i < 2; ++i)
      for (double side : {-1.0, 1.0}) {
        Vec u = v2(0.3, -0.4);  // generic point pushed to the face
        u[i] = side;
        Vec nu = Vec::Zero(2);
        nu[i] = side;
        normals.emplace_back(u, nu);
      }
    const auto rep = check_outer_normal(f, normals, t_grid, Vec::Zero(2));
    CHECK(rep.holds());
  }
  SUBCASE("reversed field violated; non-normal rejected") {
    auto fneg = VectorField::autonomous(2, 1.0, [](const Vec& x) { return Vec(-x); });
    std::vector<std::pair<Vec, Vec>> normals;
    for (const auto& d : unit_directions(2, 16)) normals.emplace_back(d, d);
    CHECK(check_outer_normal(fneg, normals, t_grid, Vec::Zero(2)).violated());

    std::vector<std::pair<Vec, Vec>> bad{{v2(1.0, 0.0), v2(-1.0, 0.0)}};
    CHECK_THROWS_AS(check_outer_normal(fneg, bad, t_grid, Vec::Zero(2)),
                    NotOuterNormalError);
  }
}

TEST_CASE("Lienard sign-condition battery on simple fields") {
  SUBCASE("h = x satisfies everything") {
    auto h = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    const auto params = LienardParams::defaults(2, 1.0, 1.0);
    const auto reps = check_lienard_conditions(h, params);
    CHECK(reps.at("H_H").holds());
    CHECK(reps.at("H_H_plus").holds());
    CHECK(reps.at("H_H_plus").margin >= 0.0);  // empirical K0 = 0
    CHECK(reps.at("lienard_i").holds());
    CHECK(reps.at("lienard_ii").holds());
    CHECK(reps.at("lienard_iii").holds());
  }
  SUBCASE("h = -x fails the sign conditions with witnesses") {
    auto h = VectorField::autonomous(2, 1.0, [](const Vec& x) { return Vec(-x); });
    const auto params = LienardParams::defaults(2, 1.0, 1.0);
    const auto reps = check_lienard_conditions(h, params);
    CHECK(reps.at("H_H").violated());
    CHECK(reps.at("lienard_i").violated());
    CHECK(reps.at("lienard_iii").violated());
    REQUIRE(reps.at("lienard_iii").witness.has_value());
    const auto& w = *reps.at("lienard_iii").witness;
    bool reproduced = false;
    const Vec hv = h.eval(w.t, w.x);
    for (int i = 0; i < 2; ++i)
      if (std::abs(w.x[i]) > 1.0 && hv[i] * w.x[i] < 0.0) reproduced = true;
    CHECK(reproduced);
  }
}

TEST_CASE("generalized Villari condition") {
  SUBCASE("h = x: every constant path has a nonzero average") {
    auto h = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    std::vector<Vec> paths{v2(1.5, 0.0), v2(0.0, -2.0), v2(1.2, 1.2)};
    const auto rep = check_villari(h, 1.0, 1.0, paths, 128);
    CHECK(rep.holds());
    // min over paths of max_i |int x_i dt|: the diagonal path gives 1.2
    CHECK(rep.margin == doctest::Approx(1.2).epsilon(1e-12));
  }
  SUBCASE("zero-mean x-independent field violates") {
    auto h = VectorField::time_dependent(2, 1.0, [](double t, const Vec&) {
      return Vec(v2(std::cos(2.0 * M_PI * t), std::sin(4.0 * M_PI * t)));
    });
    const auto rep = check_villari(h, 1.0, 1.0, {v2(2.0, 0.0)}, 256);
    CHECK(rep.violated());
  }
  SUBCASE("cutoff kills the condition outside the support") {
    auto q = [](double s) { return s * std::exp(-std::abs(s)); };
    auto h = VectorField::autonomous(2, 1.0, [q](const Vec& x) {
      const double cutoff = x.norm() < 5.0 ? 1.0 - x.norm() / 5.0 : 0.0;
      Vec out(2);
      out << (std::pow(x[0], 3) - 3.0 * x[0]) * q(std::abs(x[0])) * cutoff,
          (std::pow(x[1], 3) - 3.0 * x[1]) * q(std::abs(x[1])) * cutoff;
      return out;
    });
    const auto rep = check_villari(h, std::sqrt(3.0), 1.0, {v2(6.0, 0.0)}, 128);
    CHECK(rep.violated());
  }
  SUBCASE("paths must reach beyond d") {
    auto h = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    CHECK_THROWS_AS(check_villari(h, 1.0, 1.0, {v2(0.5, 0.5)}, 32), InputError);
  }
}

TEST_CASE("Rayleigh structure checks") {
  const auto id2 = PhiMap::p_laplacian(2, 2.0);
  std::vector<Vec> ys;
  ys.push_back(Vec::Zero(2));
  for (double r : geomspace(1e-2, 1e2, 9))
    for (const auto& d : unit_directions(2, 8)) ys.push_back(r * d);

  SUBCASE("linear damping against its own potential") {
    ScalarField G([](const Vec& z) { return -0.5 * z.squaredNorm(); },
                        [](const Vec& z) { return Vec(-z); });
    const auto res =
        check_rayleigh_structure([](const Vec& y) { return Vec(-y); }, G, id2, ys);
    CHECK(res.parallel.holds());
    CHECK(res.bounded.holds());
    CHECK(res.L == doctest::Approx(0.0));
  }
  SUBCASE("superlinear parallel field with matching potential") {
    ScalarField G([](const Vec& z) { return std::pow(z.norm(), 3) / 3.0; },
                        [](const Vec& z) { return Vec(z.norm() * z); });
    const auto res = check_rayleigh_structure(
        [](const Vec& y) { return Vec(y.norm() * y); }, G, id2, ys);
    CHECK(res.parallel.holds());
    CHECK(res.bounded.holds());
    CHECK(res.L <= 1e-9);
  }
  SUBCASE("rotation field is not parallel") {
    ScalarField G([](const Vec&) { return 0.0; },
                        [](const Vec& z) { return Vec(Vec::Zero(z.size())); });
    const auto res = check_rayleigh_structure(
        [](const Vec& y) { return Vec(v2(y[1], -y[0])); }, G, id2, ys);
    CHECK(res.parallel.violated());
    REQUIRE(res.parallel.witness.has_value());
    CHECK(res.parallel.witness->y.norm() > 0.0);
  }
}

TEST_CASE("bound set membership margins") {
  BallSet ball{Vec::Zero(2), 2.0};
  CHECK(membership_margin(ball, v2(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(membership_margin(ball, v2(3.0, 0.0)) < 0.0);
  BoxSet box{Vec::Constant(2, -1.0), Vec::Constant(2, 2.0)};
  CHECK(membership_margin(box, v2(0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(membership_margin(box, v2(2.5, 0.0)) < 0.0);
  SublevelSet sub{BoundingFn::sphere(2, 1.0)};
  CHECK(membership_margin(sub, v2(0.0, 0.0)) == doctest::Approx(0.5));
}
