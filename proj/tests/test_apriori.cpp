#include "phibvp/apriori.hpp"

#include "phibvp/quadrature.hpp"
#include "phibvp/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace phibvp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// T-periodic trigonometric polynomial trajectory with zero mean, sampled on
// the uniform N-grid together with its exact derivative
SampledTrajectory trig_trajectory(int n, int harmonics, double T, int N,
                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Mat a(harmonics, n), b(harmonics, n);
  for (int k = 0; k < harmonics; ++k)
    for (int i = 0; i < n; ++i) {
      a(k, i) = coeff(rng);
      b(k, i) = coeff(rng);
    }
  SampledTrajectory traj;
  traj.T = T;
  traj.z.resize(N, n);
  traj.dz.resize(N, n);
  for (int j = 0; j < N; ++j) {
    const double t = T * j / N;
    for (int i = 0; i < n; ++i) {
      double z = 0.0, dz = 0.0;
      for (int k = 0; k < harmonics; ++k) {
        const double w = 2.0 * M_PI * (k + 1) / T;
        z += a(k, i) * std::cos(w * t) + b(k, i) * std::sin(w * t);
        dz += w * (-a(k, i) * std::sin(w * t) + b(k, i) * std::cos(w * t));
      }
      traj.z(j, i) = z;
      traj.dz(j, i) = dz;
    }
  }
  return traj;
}

}  // namespace

TEST_CASE("K(M0, M1) formula") {
  CHECK(lemma21_bound(1.0, 3.0, 2.0, 2.0) ==
        doctest::Approx(1.0 + 3.0 * std::sqrt(2.0)).epsilon(1e-15));
  // p = inf reads the exponent as 1: K = M0 + T M1
  CHECK(lemma21_bound(0.0, 5.0, kInf, 3.0) == doctest::Approx(15.0));
  // p = 1 reads it as 0: K = M0 + M1
  CHECK(lemma21_bound(2.0, 5.0, 1.0, 3.0) == doctest::Approx(7.0));

  CHECK_THROWS_AS(lemma21_bound(-1.0, 1.0, 2.0, 1.0), InputError);
  CHECK_THROWS_AS(lemma21_bound(0.0, 0.0, 2.0, 1.0), InputError);
  CHECK_THROWS_AS(lemma21_bound(0.0, 1.0, 0.5, 1.0), InputError);

  SUBCASE("bound record carries the derived K") {
    const auto b = make_apriori_bound(1.0, 3.0, 2.0, 2.0);
    CHECK(b.K == lemma21_bound(b.M0, b.M1, b.p, b.T));
  }
  SUBCASE("monotone in each argument") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.1, 4.0);
    for (int k = 0; k < 200; ++k) {
      const double M0 = unif(rng), M1 = unif(rng), T = unif(rng);
      const double p = 1.0 + unif(rng);
      const double base = lemma21_bound(M0, M1, p, T);
      CHECK(lemma21_bound(M0 + 0.5, M1, p, T) >= base);
      CHECK(lemma21_bound(M0, M1 + 0.5, p, T) >= base);
      CHECK(lemma21_bound(M0, M1, p, T + 0.5) >= base);
    }
  }
}

TEST_CASE("family bound verification") {
  const int N = 256;
  SUBCASE("circular trajectory") {
    SampledTrajectory traj;
    traj.T = 1.0;
    traj.z.resize(N, 2);
    traj.dz.resize(N, 2);
    for (int j = 0; j < N; ++j) {
      const double t = static_cast<double>(j) / N;
      traj.z(j, 0) = std::sin(2.0 * M_PI * t);
      traj.z(j, 1) = std::cos(2.0 * M_PI * t);
      traj.dz(j, 0) = 2.0 * M_PI * std::cos(2.0 * M_PI * t);
      traj.dz(j, 1) = -2.0 * M_PI * std::sin(2.0 * M_PI * t);
    }
    // every projection of the circle vanishes somewhere; the grid minimum is
    // within one mesh step of zero
    const double M0 = 0.05;
    const double M1 = discrete_lp_norm(traj.dz, 1.0, 2.0) * (1.0 + 1e-12);
    CHECK(M1 == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
    const auto rep =
        verify_family_bound({traj}, M0, 2.0, M1, 1.0, unit_directions(2, 16));
    CHECK(rep.holds());
    CHECK(rep.margin > 5.0);  // K ~ 2 pi + M0 against sup ||z|| = 1
  }
  SUBCASE("zero trajectory holds with slack K") {
    SampledTrajectory traj;
    traj.T = 2.0;
    traj.z = Mat::Zero(N, 2);
    traj.dz = Mat::Zero(N, 2);
    const auto rep =
        verify_family_bound({traj}, 0.0, 2.0, 1.0, 2.0, unit_directions(2, 8));
    CHECK(rep.holds());
    CHECK(rep.margin == doctest::Approx(lemma21_bound(0.0, 1.0, 2.0, 2.0)));
  }
  SUBCASE("constant trajectory beyond M0 is inapplicable") {
    SampledTrajectory traj;
    traj.T = 1.0;
    traj.z = Mat::Zero(N, 2);
    traj.z.col(0).setConstant(3.0);
    traj.dz = Mat::Zero(N, 2);
    const auto rep =
        verify_family_bound({traj}, 1.0, 2.0, 1.0, 1.0, unit_directions(2, 8));
    CHECK(rep.verdict == Verdict::Inconclusive);
    REQUIRE(rep.witness.has_value());
  }
  SUBCASE("randomized trig-polynomial property: the bound never fails") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      const double T = 1.0 + (trial % 3);
      std::vector<SampledTrajectory> family;
      for (int m = 0; m < 3; ++m) family.push_back(trig_trajectory(2, 3, T, 128, rng));
      auto omegas = unit_directions(2, 12);
      // the hypotheses are made to pass by construction: zero-mean components
      // guarantee small grid projections; M0 covers the grid resolution
      double M0 = 0.0, M1 = 0.0;
      const double p = (trial % 2) ? 2.0 : kInf;
      for (const auto& traj : family) {
        double max_dz = 0.0;
        for (int j = 0; j < traj.z.rows(); ++j)
          max_dz = std::max(max_dz, traj.dz.row(j).norm());
        M0 = std::max(M0, 0.5 * (T / 128) * max_dz * 1.05);
        M1 = std::max(M1, discrete_lp_norm(traj.dz, T, p) * (1.0 + 1e-9));
      }
      const auto rep = verify_family_bound(family, M0, p, M1, T, omegas);
      CHECK(rep.verdict != Verdict::Violated);
    }
  }
}

TEST_CASE("growth condition (NH1)") {
  const auto ts = linspace(0.0, 1.0, 16);
  std::vector<Vec> xs, ys;
  for (const auto& d : unit_directions(2, 8))
    for (double r : {0.0, 0.5, 1.0, 2.0}) xs.push_back(r * d);
  ys.push_back(Vec::Zero(2));
  for (const auto& d : unit_directions(2, 8))
    for (double r : geomspace(0.1, 10.0, 5)) ys.push_back(r * d);

  SUBCASE("constant envelope for a velocity-free field diverges") {
    auto f = VectorField::time_dependent(2, 1.0, [](double t, const Vec& x) {
      Vec c(2);
      c << std::cos(2.0 * M_PI * t), std::sin(2.0 * M_PI * t);
      return Vec(x - c);
    });
    const auto res = check_nh1(f, [](double) { return 3.0 + 1e-9; }, 2.0, ts, xs, ys);
    CHECK(res.report.holds());
    CHECK(res.integral_divergent);
    // int_1^Xi s / eta ds = (Xi^2 - 1) / (2 eta)
    const double Xi = 1e6;
    CHECK(res.partial_integrals.back() ==
          doctest::Approx((Xi * Xi - 1.0) / (2.0 * (3.0 + 1e-9))).epsilon(1e-6));
  }
  SUBCASE("quadratic envelope: logarithmic growth still flags divergence") {
    auto f = VectorField::velocity_dependent(
        2, 1.0, [](double, const Vec&, const Vec& y) { return Vec(y.norm() * y); });
    const auto res = check_nh1(f, [](double s) { return 1.0 + s * s; }, 2.0, ts, xs, ys);
    CHECK(res.report.holds());
    CHECK(res.integral_divergent);
    const double Xi = 1e6;
    const double analytic = 0.5 * (std::log1p(Xi * Xi) - std::log1p(1.0));
    CHECK(res.partial_integrals.back() == doctest::Approx(analytic).epsilon(1e-8));
  }
  SUBCASE("cubic envelope saturates: the integral condition fails") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    const auto res =
        check_nh1(f, [](double s) { return std::pow(1.0 + s, 3); }, 2.0, ts, xs, ys);
    CHECK_FALSE(res.integral_divergent);
    // analytic tail: int_1^inf s (1+s)^-3 ds = 3/8
    CHECK(res.partial_integrals.back() == doctest::Approx(3.0 / 8.0).epsilon(1e-6));
  }
  SUBCASE("envelope violation carries a witness") {
    auto f = VectorField::velocity_dependent(
        2, 1.0, [](double, const Vec&, const Vec& y) { return Vec(y.norm() * y); });
    const auto res = check_nh1(f, [](double s) { return 1.0 + s; }, 2.0, ts, xs, ys);
    CHECK(res.report.violated());
    REQUIRE(res.report.witness.has_value());
    const auto& w = *res.report.witness;
    CHECK(f.eval(w.t, w.x, w.y).norm() > 1.0 + w.y.norm());
  }
}

TEST_CASE("growth condition (NH2)") {
  const auto ts = linspace(0.0, 1.0, 8);
  std::vector<Vec> xs, ys;
  for (const auto& d : unit_directions(2, 8))
    for (double r : {0.0, 0.5, 1.0}) xs.push_back(r * d);
  ys.push_back(Vec::Zero(2));
  for (const auto& d : unit_directions(2, 8))
    for (double r : geomspace(0.1, 10.0, 5)) ys.push_back(r * d);

  SUBCASE("f = x with alpha = 0, beta = R") {
    auto f = VectorField::autonomous(2, 1.0, [](const Vec& x) { return x; });
    const auto rep = check_nh2(f, 0.0, 1.0 + 1e-9, 1.0, ts, xs, ys);
    CHECK(rep.holds());
    // the aggregated growth spec routes to the same checkers
    NagumoGrowthSpec spec{[](double) { return 1.0 + 1e-9; }, 0.0, 1.0 + 1e-9, 1.0};
    CHECK(check_nh2(f, spec, ts, xs, ys).holds());
    CHECK(check_nh1(f, spec, ts, xs, ys).report.holds());
  }
  SUBCASE("f = x + y with alpha = 1 and generous beta") {
    auto f = VectorField::velocity_dependent(
        2, 1.0, [](double, const Vec& x, const Vec& y) { return Vec(x + y); });
    const auto rep = check_nh2(f, 1.0, 10.0, 1.0, ts, xs, ys);
    CHECK(rep.holds());
  }
  SUBCASE("cubic velocity growth beats any constant") {
    auto f =
        VectorField::velocity_dependent(2, 1.0, [](double, const Vec&, const Vec& y) {
          Vec out = Vec::Zero(2);
          out[0] = std::pow(y.norm(), 3);
          return out;
        });
    const auto rep = check_nh2(f, 0.0, 5.0, 1.0, ts, xs, ys);
    CHECK(rep.violated());
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->y.norm() > std::cbrt(5.0) * 0.99);
  }
}

TEST_CASE("blow-up construction") {
  SUBCASE("identity phi, gamma = 1/2: x(t) = 2 - 2 sqrt(1 - t)") {
    BlowUpSpec spec{PhiMap::p_laplacian(1, 2.0), 0.5, 1e-11};
    auto [x, dx] = blowup_solution(spec, 0.75);
    CHECK(std::abs(x - 1.0) <= 1e-9);
    CHECK(dx == doctest::Approx(2.0).epsilon(1e-12));

    auto [x0, dx0] = blowup_solution(spec, 0.0);
    CHECK(x0 == 0.0);
    CHECK(dx0 == doctest::Approx(1.0));  // phi^{-1}(1)

    auto [x1, dx1] = blowup_solution(spec, 1.0 - 1e-6);
    CHECK(dx1 == doctest::Approx(1e3).epsilon(1e-9));
    CHECK(x1 <= 2.0);
    CHECK(x1 == doctest::Approx(2.0 - 2e-3).epsilon(1e-9));

    CHECK_THROWS_AS(blowup_solution(spec, 1.0), DomainError);
    CHECK_THROWS_AS(blowup_solution(spec, 1.5), DomainError);
  }
  SUBCASE("p = 4 scalar operator, gamma = 1: x(t) = (3/2)(1 - (1-t)^(2/3))") {
    BlowUpSpec spec{PhiMap::p_laplacian(1, 4.0), 1.0, 1e-11};
    auto [x, dx] = blowup_solution(spec, 0.875);
    CHECK(x == doctest::Approx(9.0 / 8.0).epsilon(1e-9));
    CHECK(dx == doctest::Approx(2.0).epsilon(1e-12));  // (1/8)^(-1/3)
  }
  SUBCASE("differential identity (phi(x'))' = gamma (phi(x'))^((1+gamma)/gamma)") {
    BlowUpSpec spec{PhiMap::p_laplacian(1, 2.0), 0.5, 1e-11};
    for (double t : linspace(0.01, 0.98, 25)) {
      const double ht = 1e-5 * (1.0 - t);
      auto u = [&](double tt) {
        return spec.phi.apply_scalar(blowup_solution(spec, tt).second);
      };
      const double lhs = (u(t + ht) - u(t - ht)) / (2.0 * ht);
      const double rhs = spec.gamma * std::pow(u(t), 3.0);
      CHECK(std::abs(lhs - rhs) <= 1e-4 * std::abs(rhs));
    }
  }
}

TEST_CASE("blow-up integrability heuristic") {
  const auto id1 = PhiMap::p_laplacian(1, 2.0);
  SUBCASE("gamma = 1/2: integrand xi^-2, tail -> 1") {
    const auto res = check_blowup_integrability(id1, 0.5);
    CHECK(res.convergent);
    CHECK(res.partials.back() == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("gamma = 2: integrand xi^-1/2 diverges") {
    const auto res = check_blowup_integrability(id1, 2.0);
    CHECK_FALSE(res.convergent);
  }
  SUBCASE("p-Laplacian exponent algebra: converges iff gamma < p - 1") {
    // the decade-ratio threshold 1/2 resolves tails up to exponent ~ -1.3,
    // so the probes stay away from the gamma = p - 1 borderline
    const auto p4 = PhiMap::p_laplacian(1, 4.0);
    CHECK(check_blowup_integrability(p4, 1.0).convergent);
    CHECK(check_blowup_integrability(p4, 1.4).convergent);
    CHECK_FALSE(check_blowup_integrability(p4, 3.0).convergent);  // log-divergent
    CHECK_FALSE(check_blowup_integrability(p4, 3.5).convergent);
  }
}
