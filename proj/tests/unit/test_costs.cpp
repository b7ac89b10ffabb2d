#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wassfem/costs.hpp"
#include "wassfem/errors.hpp"

using namespace wassfem;

namespace {

CostModel model(CostCase kind, double c = 0.1, double rho_max = 2.0) {
  CostModel m;
  m.kind = kind;
  m.c = c;
  m.rho_max = rho_max;
  return m;
}

const CostCase kAllCases[] = {CostCase::Zero, CostCase::Quadratic, CostCase::Entropy,
                              CostCase::InverseDensity, CostCase::BoxConstraint};

std::shared_ptr<const SpaceTimeMesh> unit_mesh(int n) {
  Box b;
  b.dim = 1;
  b.lower[0] = 0.0;
  b.upper[0] = 1.0;
  return std::make_shared<const SpaceTimeMesh>(build_spatial_mesh(b, {n, 1}), n);
}

}  // namespace

TEST_CASE("kinetic cost") {
  const double m1[] = {0.5};
  CHECK(eval_L(1.0, m1) == doctest::Approx(0.125));
  const double zero[] = {0.0};
  CHECK(eval_L(0.0, zero) == 0.0);
  const double one[] = {1.0};
  CHECK(std::isinf(eval_L(0.0, one)));
  CHECK(std::isinf(eval_L(1e-13, one)));
  CHECK_THROWS_AS(eval_L(-1.0, one), ArgumentError);
}

TEST_CASE("conjugate values") {
  CHECK(eval_A_star(model(CostCase::Quadratic), 0.2).value == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(eval_A_star(model(CostCase::Entropy), 0.1).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval_A_star(model(CostCase::BoxConstraint), -3.0).value == 0.0);
  CHECK(eval_A_star(model(CostCase::BoxConstraint), 3.0).value == doctest::Approx(6.0));
  CHECK_FALSE(eval_A_star(model(CostCase::Zero), 0.5).finite);
  CHECK_FALSE(eval_A_star(model(CostCase::InverseDensity), 0.5).finite);
  CHECK(eval_A_star(model(CostCase::InverseDensity), -0.4).value == doctest::Approx(-2.0 * std::sqrt(0.04)));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> s(-3.0, 3.0);
  for (CostCase k : kAllCases) {
    for (int i = 0; i < 200; ++i) {
      const double x = s(rng);
      const ConvexValue v = eval_A_star(model(k), x);
      const double o = oracle::a_star(model(k), x);
      if (std::isinf(o)) {
        CHECK_FALSE(v.finite);
      } else {
        CHECK(v.value == doctest::Approx(o).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(model(CostCase::Quadratic, -1.0).validate(), ArgumentError);
  CHECK_THROWS_AS(model(CostCase::BoxConstraint, 0.1, 0.0).validate(), ArgumentError);
  CHECK(cost_case_from_string(to_string(CostCase::InverseDensity)) == CostCase::InverseDensity);
}

TEST_CASE("conjugate derivative is monotone on smooth cases") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> s(-2.0, 2.0);
  for (CostCase k : {CostCase::Quadratic, CostCase::Entropy}) {
    for (int i = 0; i < 1000; ++i) {
      double a = s(rng), b = s(rng);
      if (a > b) std::swap(a, b);
      CHECK(eval_A_star(model(k), a).derivative <= eval_A_star(model(k), b).derivative);
    }
  }
}

TEST_CASE("Fenchel-Young on smooth cases") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> rho(0.01, 5.0), s(-2.0, 2.0);
  for (CostCase k : {CostCase::Quadratic, CostCase::Entropy}) {
    const CostModel m = model(k);
    for (int i = 0; i < 500; ++i) {
      const double r = rho(rng), x = s(rng);
      CHECK(eval_A(m, r).value + eval_A_star(m, x).value >= r * x - 1e-12);
      const double sr = eval_A(m, r).derivative;
      CHECK(std::abs(eval_A(m, r).value + eval_A_star(m, sr).value - r * sr) <= 1e-8 * std::max(1.0, std::abs(r * sr)));
      // the derivative of the conjugate recovers the density
      CHECK(eval_A_star(m, sr).derivative == doctest::Approx(r).epsilon(1e-10));
    }
  }
}

TEST_CASE("prox examples") {
  const double b1[] = {-1.0, 0.0, 0.0};
  auto r = prox_alpha(model(CostCase::Zero), b1, 1.0);
  CHECK(r.a[0] == doctest::Approx(-1.0));
  CHECK(r.a[1] == 0.0);
  const double b2[] = {1.0, 0.0, 0.0};
  r = prox_alpha(model(CostCase::Zero), b2, 1.0);
  for (double x : r.a) CHECK(std::abs(x) <= 1e-12);

  const double b3[] = {0.3, 0.2};
  r = prox_alpha(model(CostCase::Entropy), b3, 1.0);
  const auto o = oracle::prox_alpha_2d(model(CostCase::Entropy), 0.3, 0.2, 1.0);
  CHECK(std::abs(r.a[0] - o.a[0]) <= 2e-3);
  CHECK(std::abs(r.a[1] - o.a[1]) <= 2e-3);

  const double b0[] = {0.0, 0.0};
  r = prox_alpha(model(CostCase::Zero), b0, 1.0);
  CHECK(r.a[0] == 0.0);
  CHECK(r.a[1] == 0.0);
  CHECK_THROWS_AS(prox_alpha(model(CostCase::Zero), b0, 0.0), ArgumentError);
}

TEST_CASE("prox matches the brute-force oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> b(-2.0, 2.0), r(0.2, 2.0);
  for (CostCase k : kAllCases) {
    const CostModel m = model(k);
    for (int i = 0; i < 60; ++i) {
      const double b0 = b(rng), b1 = b(rng), rr = r(rng);
      const double bb[] = {b0, b1};
      const auto got = prox_alpha(m, bb, rr);
      const auto o = oracle::prox_alpha_2d(m, b0, b1, rr);
      const double fv = oracle::prox_objective(m, {got.a[0], got.a[1]}, {b0, b1}, rr);
      INFO(to_string(k), " b=(", b0, ",", b1, ") r=", rr);
      CHECK(std::abs(got.a[0] - o.a[0]) <= 1e-4);
      CHECK(std::abs(got.a[1] - o.a[1]) <= 1e-4);
      CHECK(std::abs(fv - o.value) <= 1e-6);
    }
  }
}

TEST_CASE("prox optimality under perturbation, 3 components") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> b(-2.0, 2.0), r(0.1, 3.0), u(-1e-3, 1e-3);
  for (CostCase k : kAllCases) {
    const CostModel m = model(k);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> bb{b(rng), b(rng), b(rng)};
      const double rr = r(rng);
      const auto got = prox_alpha(m, bb, rr);
      const std::vector<double> a{got.a[0], got.a[1], got.a[2]};
      const double f0 = prox_alpha_objective(m, a, bb, rr);
      REQUIRE(std::isfinite(f0));
      for (int p = 0; p < 50; ++p) {
        std::vector<double> ap{a[0] + u(rng), a[1] + u(rng), a[2] + u(rng)};
        CHECK(f0 <= prox_alpha_objective(m, ap, bb, rr) + 1e-12);
      }
    }
  }
}

TEST_CASE("doubling r1 never increases the prox norm") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> b(-2.0, 2.0), r(0.1, 2.0);
  for (CostCase k : kAllCases) {
    for (int i = 0; i < 300; ++i) {
      const double bb[] = {b(rng), b(rng)};
      const double rr = r(rng);
      const auto a1 = prox_alpha(model(k), bb, rr);
      const auto a2 = prox_alpha(model(k), bb, 2.0 * rr);
      CHECK(std::hypot(a2.a[0], a2.a[1]) <= std::hypot(a1.a[0], a1.a[1]) + 1e-10);
    }
  }
}

TEST_CASE("terminal cost and prox") {
  CHECK(prox_rho1(0.0, 2.0, 1.0) == doctest::Approx(1.0));
  CHECK(prox_rho1(0.0, -0.5, 1.0) == 0.0);
  CHECK(std::abs(prox_rho1(1.0, 0.5, 1.0) - oracle::prox_rho1(1.0, 0.5, 1.0, true)) <= 1e-4);
  CHECK_THROWS_AS(prox_rho1(1.0, 0.5, 0.0), ArgumentError);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> t(0.0, 3.0), b(-3.0, 3.0), r(0.2, 2.0), y(-4.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    const double rt = t(rng), bb = b(rng), rr = r(rng), yy = y(rng);
    CHECK(eval_Gamma_star(rt, yy).value == doctest::Approx(oracle::gamma_star(rt, yy)).epsilon(1e-12));
    for (bool nonneg : {true, false}) {
      const auto dom = nonneg ? TerminalProxDomain::Nonnegative : TerminalProxDomain::Real;
      const double got = prox_rho1(rt, bb, rr, dom);
      const double o = oracle::prox_rho1(rt, bb, rr, nonneg);
      CHECK(std::abs(got - o) <= 1e-4);
      CHECK(std::abs(prox_rho1_objective(rt, got, bb, rr) - prox_rho1_objective(rt, o, bb, rr)) <= 1e-6);
      if (nonneg) CHECK(got >= 0.0);
    }
  }
  CHECK(eval_Gamma(1.0, 3.0).value == doctest::Approx(2.0));
  CHECK_FALSE(eval_Gamma(1.0, -0.1).finite);
}

TEST_CASE("discrete conjugate functionals") {
  auto mesh = unit_mesh(2);
  const WSpace w = build_w_space(mesh, 1);
  const MSpace m = build_m_space(mesh, 1);
  CoefficientField as(SpaceKind::W, w.num_dofs(), 2);
  CHECK(eval_F_h_star(model(CostCase::Quadratic), w, as).value == 0.0);
  for (std::size_t d = 0; d < as.num_dofs(); ++d) as(d, 0) = 0.1;
  CHECK(eval_F_h_star(model(CostCase::Entropy), w, as).value == doctest::Approx(1.0).epsilon(1e-13));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double oracle_sum = 0.0;
  for (std::size_t d = 0; d < as.num_dofs(); ++d) {
    as(d, 0) = u(rng);
    as(d, 1) = u(rng);
    oracle_sum += w.weight(static_cast<int>(d % w.points_per_cell())) *
                  oracle::a_star(model(CostCase::Entropy), as(d, 0) + 0.5 * as(d, 1) * as(d, 1));
  }
  CHECK(std::abs(eval_F_h_star(model(CostCase::Entropy), w, as).value - oracle_sum) <= 1e-12);

  for (std::size_t d = 0; d < as.num_dofs(); ++d) as(d, 0) = 1.0;
  const FunctionalValue inf = eval_F_h_star(model(CostCase::Zero), w, as);
  CHECK_FALSE(inf.finite);
  CHECK(inf.infinite_points == as.num_dofs());

  std::vector<double> target(m.num_dofs()), ystar(m.num_dofs());
  double osum = 0.0;
  for (int i = 0; i < m.num_dofs(); ++i) {
    target[i] = 1.0 + u(rng) * 0.5;
    ystar[i] = u(rng);
    osum += m.weight(i % m.points_per_cell()) * oracle::gamma_star(target[i], ystar[i]);
  }
  CHECK(std::abs(eval_R_h_star(target, m, ystar).value - osum) <= 1e-12);
}
