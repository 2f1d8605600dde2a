#include "phibvp/scenarios.hpp"

#include "phibvp/sampling.hpp"

#include <doctest.h>

#include <cmath>

using namespace phibvp;

namespace {

const double kTwoPi = 2.0 * M_PI;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::function<Vec(double)> circle_forcing(int n) {
  return [n](double t) -> Vec {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = std::cos(kTwoPi * t - i * M_PI_2);
    return c;
  };
}

Scenario lienard_iii_instance() {
  // G = x^2/2, h = x^3, p = cos(2 pi t) on the line
  FrictionPotential G([](const Vec& x) { return 0.5 * x.squaredNorm(); },
                      [](const Vec& x) { return x; });
  auto h = VectorField::autonomous(1, 1.0, [](const Vec& x) {
    return Vec(Vec::Constant(1, std::pow(x[0], 3)));
  });
  LienardBuildParams bp;
  bp.d = 1.0;
  return build_lienard(
      G, h, [](double t) { return Vec(Vec::Constant(1, std::cos(kTwoPi * t))); },
      [](double t) { return Vec(Vec::Constant(1, std::sin(kTwoPi * t) / kTwoPi)); },
      LienardVariant::III, bp, PhiMap::p_laplacian(1, 2.0), 1.0);
}

}  // namespace

TEST_CASE("Hartman-Knobloch builder") {
  SUBCASE("canonical forced instance") {
    const auto s = build_hartman_knobloch(2, 3.0, 2.0, circle_forcing(2));
    CHECK(s.warnings.empty());
    CHECK(s.constants.at("hartman_margin_lb") == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.constants.at("R2") == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.constants.at("K_phi") == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.constants.at("K_deriv") == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    // lambda endpoints of the convex homotopy
    const Vec x = v2(0.3, -1.1);
    CHECK((s.family.eval(0.37, x, Vec::Zero(2), 0.0) - x).norm() == 0.0);
    CHECK((s.family.eval(0.37, x, Vec::Zero(2), 1.0) - s.field.eval(0.37, x)).norm() ==
          0.0);
  }
  SUBCASE("unforced margin is R^2") {
    const auto s = build_hartman_knobloch(2, 2.0, 1.5,
                                          [](double) { return Vec(Vec::Zero(2)); });
    CHECK(s.constants.at("hartman_margin_lb") == doctest::Approx(2.25));
  }
  SUBCASE("small ball against a unit forcing warns") {
    const auto s = build_hartman_knobloch(2, 3.0, 0.5, circle_forcing(2));
    REQUIRE_FALSE(s.warnings.empty());
    CHECK(s.constants.at("hartman_margin_lb") == doctest::Approx(-0.25).epsilon(1e-9));
  }
}

TEST_CASE("Poincare-Miranda builder") {
  auto cubic = [](double t, const Vec& x) {
    Vec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      out[i] = std::pow(x[i], 3) - std::cos(kTwoPi * t);
    return out;
  };
  SUBCASE("cubic on [-2, 2] passes the face conditions") {
    BoxSet box{Vec::Constant(1, -2.0), Vec::Constant(1, 2.0)};
    const auto s = build_poincare_miranda(box, cubic, PhiMap::p_laplacian(1, 2.0));
    const auto ver = verify_scenario(s, VerifyOptions::defaults(1));
    CHECK(ver.matrix_matches());
    CHECK(ver.find("poincare_miranda")->margin == doctest::Approx(7.0));
  }
  SUBCASE("identity on the symmetric box") {
    BoxSet box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)};
    const auto s = build_poincare_miranda(
        box, [](double, const Vec& x) { return x; }, PhiMap::p_laplacian(2, 2.0));
    const auto ver = verify_scenario(s, VerifyOptions::defaults(2));
    CHECK(ver.find("poincare_miranda")->holds());
  }
  SUBCASE("reversed inequalities are reported violated") {
    BoxSet box{Vec::Constant(1, -2.0), Vec::Constant(1, 2.0)};
    const auto s = build_poincare_miranda(
        box, [](double, const Vec& x) { return Vec(-x); }, PhiMap::p_laplacian(1, 2.0));
    const auto ver = verify_scenario(s, VerifyOptions::defaults(1));
    CHECK(ver.find("poincare_miranda")->violated());
    CHECK_FALSE(ver.matrix_matches());
  }
  SUBCASE("degenerate boxes are rejected") {
    BoxSet box{Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    CHECK_THROWS_AS(
        build_poincare_miranda(box, cubic, PhiMap::p_laplacian(1, 2.0)), BuildError);
  }
}

TEST_CASE("Rayleigh builder") {
  const auto phi = PhiMap::p_laplacian(2, 2.0);
  auto h = [](double t, const Vec& x) {
    Vec c(2);
    c << std::cos(kTwoPi * t), std::sin(kTwoPi * t);
    return Vec(x - c);
  };
  SUBCASE("linear damping instance builds and passes its checks") {
    FrictionPotential G([](const Vec& z) { return -0.5 * z.squaredNorm(); },
                        [](const Vec& z) { return Vec(-z); });
    const auto s = build_rayleigh([](const Vec& y) { return Vec(-y); }, G, h,
                                  BoundingFn::sphere(2, 2.0), phi);
    CHECK(s.constants.at("L") <= 1e-12);
    const auto ver = verify_scenario(s, VerifyOptions::defaults(2));
    CHECK(ver.matrix_matches());
  }
  SUBCASE("zero velocity field reduces to the gradient-homotopy case") {
    FrictionPotential G([](const Vec&) { return 0.0; },
                        [](const Vec& z) { return Vec(Vec::Zero(z.size())); });
    const auto s = build_rayleigh([](const Vec&) { return Vec(Vec::Zero(2)); }, G, h,
                                  BoundingFn::sphere(2, 2.0), phi);
    CHECK(s.constants.at("L") == doctest::Approx(0.0));
  }
  SUBCASE("rotation velocity field is rejected") {
    FrictionPotential G([](const Vec&) { return 0.0; },
                        [](const Vec& z) { return Vec(Vec::Zero(z.size())); });
    CHECK_THROWS_AS(
        build_rayleigh([](const Vec& y) { return Vec(v2(y[1], -y[0])); }, G, h,
                       BoundingFn::sphere(2, 2.0), phi),
        BuildError);
  }
}

TEST_CASE("Lienard builder") {
  SUBCASE("variant (iii) instance: constants follow the proof chain") {
    const auto s = lienard_iii_instance();
    // P = sin(2 pi t)/(2 pi): P_inf = 1/(2 pi); empirical K0 = 0 for h = x^3;
    // the optimal eta doubles P_inf, giving K1 = T P_inf
    CHECK(s.constants.at("P_inf") == doctest::Approx(1.0 / kTwoPi).epsilon(1e-6));
    CHECK(s.constants.at("K0") == doctest::Approx(0.0));
    CHECK(s.constants.at("K1") == doctest::Approx(1.0 / kTwoPi).epsilon(1e-2));
    CHECK(s.constants.at("R_star") ==
          doctest::Approx(1.0 + s.constants.at("K1")).epsilon(1e-9));
    const auto ver = verify_scenario(s, VerifyOptions::defaults(1));
    CHECK(ver.matrix_matches());
    CHECK(ver.find("lienard_iii")->holds());
    CHECK(ver.find("villari")->holds());
    CHECK(ver.find("H_H_plus")->holds());
  }
  SUBCASE("thm-0 variant with h = x collapses to the trivial solution") {
    FrictionPotential G([](const Vec&) { return 0.0; },
                        [](const Vec& x) { return Vec(Vec::Zero(x.size())); });
    auto h = VectorField::autonomous(1, 1.0, [](const Vec& x) { return x; });
    LienardBuildParams bp;
    bp.R = 1.0;
    const auto s = build_lienard(G, h, nullptr, nullptr, LienardVariant::Thm0, bp,
                                 PhiMap::p_laplacian(1, 2.0), 1.0);
    // eta = 1 and M_1 = 1/4 for the identity operator: K1 = T (K0 + M_1)
    CHECK(s.constants.at("eta") == doctest::Approx(1.0));
    CHECK(s.constants.at("K1") ==
          doctest::Approx(s.constants.at("K0") + 0.25).epsilon(1e-6));

    PeriodicCollocation solver(s.family, s.phi, 64);
    const auto res =
        solver.continue_to_target(linspace(0.0, 1.0, 11), SolverOptions{}, s.interior_point);
    REQUIRE(res.converged());
    CHECK(res.solution->x.cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("variant (i) built on the first planar example") {
    const auto probe = build_remark33_example(1, 0.1);
    FrictionPotential G([](const Vec& x) { return 0.5 * x.squaredNorm(); },
                        [](const Vec& x) { return x; });
    LienardBuildParams bp;
    bp.d = 1.0;
    bp.sampling = probe.lienard_params;
    const auto s = build_lienard(
        G, probe.field,
        [](double t) { return Vec(v2(std::cos(kTwoPi * t), std::sin(kTwoPi * t))); },
        [](double t) {
          return Vec(v2(std::sin(kTwoPi * t) / kTwoPi, -std::cos(kTwoPi * t) / kTwoPi));
        },
        LienardVariant::I, bp, PhiMap::p_laplacian(2, 2.0), 1.0);
    const auto ver = verify_scenario(s, VerifyOptions::defaults(2));
    CHECK(ver.matrix_matches());
    CHECK(s.constants.at("R_star") > s.constants.at("R_gamma"));
  }
  SUBCASE("nonzero-mean forcing is rejected") {
    FrictionPotential G([](const Vec&) { return 0.0; },
                        [](const Vec& x) { return Vec(Vec::Zero(x.size())); });
    auto h = VectorField::autonomous(1, 1.0, [](const Vec& x) { return x; });
    LienardBuildParams bp;
    CHECK_THROWS_AS(
        build_lienard(G, h, [](double) { return Vec(Vec::Constant(1, 0.3)); }, nullptr,
                      LienardVariant::III, bp, PhiMap::p_laplacian(1, 2.0), 1.0),
        BuildError);
  }
}

TEST_CASE("planar sign-condition examples") {
  SUBCASE("exactly one growth condition holds per example") {
    for (int k = 1; k <= 3; ++k) {
      const auto s = build_remark33_example(k);
      const auto ver = verify_scenario(s, VerifyOptions::defaults(2));
      CHECK(ver.matrix_matches());
      CHECK(ver.find("H_H_plus")->holds());
      CHECK(ver.find("lienard_i")->holds() == (k == 1));
      CHECK(ver.find("lienard_ii")->holds() == (k == 2));
      CHECK(ver.find("lienard_iii")->holds() == (k == 3));
    }
  }
  SUBCASE("printed witness values") {
    const auto s1 = build_remark33_example(1, 0.1);
    // <h(x+y), x> at x = (10,10), y = (-1,0): eps s (atan(s-1) + atan s) - s
    const Vec x = v2(10.0, 10.0);
    const Vec y = v2(-1.0, 0.0);
    const double val = s1.field.eval(0.0, x + y).dot(x);
    const double expected = 0.1 * 10.0 * (std::atan(9.0) + std::atan(10.0)) - 10.0;
    CHECK(val == doctest::Approx(expected).epsilon(1e-12));
    CHECK(val == doctest::Approx(-7.0687).epsilon(1e-4));
    CHECK(val <= 10.0 * (0.1 * M_PI - 1.0));  // the printed upper bound

    const auto s2 = build_remark33_example(2);
    // h_1(x) x_1 = -s^2 q(sqrt 5 s) at x = (s, 2s), s = 1
    const double q5 = std::sqrt(5.0) * std::exp(-std::sqrt(5.0));
    CHECK(s2.field.eval(0.0, v2(1.0, 2.0))[0] * 1.0 ==
          doctest::Approx(-q5).epsilon(1e-12));

    const auto s3 = build_remark33_example(3);
    // <h(x), x> tends to -2/e along x = (s, 1)
    const double far = s3.field.eval(0.0, v2(100.0, 1.0)).dot(v2(100.0, 1.0));
    CHECK(far == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-3));
  }
  SUBCASE("eps range guard") {
    CHECK_THROWS_AS(build_remark33_example(1, 0.5), BuildError);
    CHECK_THROWS_AS(build_remark33_example(1, 0.0), BuildError);
    CHECK_THROWS_AS(build_remark33_example(4), BuildError);
  }
}

TEST_CASE("blow-up scenario") {
  CHECK_NOTHROW(build_blowup(0.5, PhiMap::p_laplacian(1, 2.0)));
  CHECK_THROWS_AS(build_blowup(2.0, PhiMap::p_laplacian(1, 2.0)), BuildError);
  CHECK_NOTHROW(build_blowup(1.0, PhiMap::p_laplacian(1, 4.0)));

  const auto s = make_blowup_scenario(0.5, PhiMap::p_laplacian(1, 2.0));
  CHECK_FALSE(s.solvable());
  const auto ver = verify_scenario(s, VerifyOptions::defaults(1));
  CHECK(ver.matrix_matches());
  REQUIRE(ver.integrability.has_value());
  CHECK(ver.integrability->convergent);
}

TEST_CASE("golden verdict matrices at default grids") {
  const auto check_scenario = [](const Scenario& s) {
    const auto ver = verify_scenario(s, VerifyOptions::defaults(s.n));
    CHECK(ver.matrix_matches());
    CHECK_FALSE(ver.any_expected_hold_violated());
  };
  check_scenario(build_hartman_knobloch(2, 3.0, 2.0, circle_forcing(2)));
  check_scenario(build_hartman_knobloch(1, 2.0, 2.0, circle_forcing(1)));
  {
    BoxSet box{Vec::Constant(1, -2.0), Vec::Constant(1, 2.0)};
    check_scenario(build_poincare_miranda(
        box,
        [](double t, const Vec& x) {
          return Vec(Vec::Constant(1, std::pow(x[0], 3) - std::cos(kTwoPi * t)));
        },
        PhiMap::p_laplacian(1, 2.0)));
  }
  check_scenario(lienard_iii_instance());
}

TEST_CASE("degree certificates ride along the verification") {
  const auto s = build_hartman_knobloch(2, 3.0, 2.0, circle_forcing(2));
  const auto ver = verify_scenario(s, VerifyOptions::defaults(2));
  REQUIRE(ver.degree.has_value());
  CHECK(ver.degree->certified);
  CHECK(ver.degree->value == 1);
  REQUIRE(ver.convexity.has_value());
  CHECK(ver.convexity->status == ConvexityStatus::ConvexAtSamples);
}

TEST_CASE("Lienard proof chain holds along the whole continuation trace") {
  const auto s = lienard_iii_instance();
  PeriodicCollocation solver(s.family, s.phi, 128);
  const auto res =
      solver.continue_to_target(linspace(0.0, 1.0, 11), SolverOptions{}, s.interior_point);
  REQUIRE(res.converged());
  const double K1 = s.constants.at("K1");
  const double R_star = s.constants.at("R_star");
  for (const auto& sol : res.trace) {
    double l1 = 0.0, sup = 0.0;
    for (int j = 0; j < sol.N; ++j) {
      l1 += s.phi.invert(sol.y.row(j)).norm();
      sup = std::max(sup, sol.x.row(j).norm());
    }
    l1 *= sol.h;
    CHECK(l1 <= K1 + 1e-9);
    CHECK(sup <= R_star + 1e-9);
  }
}
