#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wassfem/errors.hpp"
#include "wassfem/quad.hpp"

using namespace wassfem;

TEST_CASE("gauss_legendre small rules") {
  const QuadRule1D g1 = gauss_legendre(1);
  REQUIRE(g1.size() == 1);
  CHECK(g1.nodes[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g1.exact_degree == 1);

  const QuadRule1D g2 = gauss_legendre(2);
  CHECK(g2.nodes[0] == doctest::Approx((1.0 - 1.0 / std::sqrt(3.0)) / 2.0).epsilon(1e-15));
  CHECK(g2.nodes[1] == doctest::Approx((1.0 + 1.0 / std::sqrt(3.0)) / 2.0).epsilon(1e-15));
  CHECK(g2.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  double cube = 0.0;
  for (int i = 0; i < 2; ++i) cube += g2.weights[i] * std::pow(g2.nodes[i], 3);
  CHECK(std::abs(cube - 0.25) <= 1e-15);

  const QuadRule1D g3 = gauss_legendre(3);
  CHECK(g3.nodes[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g3.nodes[0] == doctest::Approx(0.5 - 0.5 * std::sqrt(0.6)).epsilon(1e-15));
  CHECK(g3.weights[0] == doctest::Approx(5.0 / 18.0).epsilon(1e-15));
  CHECK(g3.weights[1] == doctest::Approx(8.0 / 18.0).epsilon(1e-15));
}

TEST_CASE("gauss_legendre structure and range") {
  for (int n = 1; n <= 16; ++n) {
    const QuadRule1D g = gauss_legendre(n);
    CHECK(g.exact_degree == 2 * n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(g.nodes[i] > 0.0);
      CHECK(g.nodes[i] < 1.0);
      CHECK(g.weights[i] > 0.0);
      if (i > 0) CHECK(g.nodes[i] > g.nodes[i - 1]);
      sum += g.weights[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS(gauss_legendre(0), ArgumentError);
  CHECK_THROWS_AS(gauss_legendre(17), ArgumentError);
}

TEST_CASE("gauss_legendre matches the Golub-Welsch oracle") {
  for (int n = 1; n <= 16; ++n) {
    std::vector<double> x, w;
    oracle::golub_welsch(n, x, w);
    const QuadRule1D g = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(g.nodes[i] - x[i]) <= 1e-13);
      CHECK(std::abs(g.weights[i] - w[i]) <= 1e-13);
    }
  }
}

TEST_CASE("monomial exactness") {
  for (int n = 1; n <= 8; ++n) {
    const QuadRule1D g = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      const double exact = 1.0 / (p + 1);
      CHECK(std::abs(s - exact) / exact <= 1e-13);
    }
  }
}

TEST_CASE("gauss_lobatto includes endpoints") {
  for (int n = 2; n <= 10; ++n) {
    const QuadRule1D g = gauss_lobatto(n);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 1.0);
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    CHECK(std::abs(sum - 1.0) <= 1e-14);
    for (int p = 0; p <= 2 * n - 3; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      CHECK(std::abs(s - 1.0 / (p + 1)) <= 1e-13);
    }
  }
  CHECK_THROWS_AS(gauss_lobatto(1), ArgumentError);
}

TEST_CASE("tensor_rule") {
  const std::vector<QuadRule1D> one{gauss_legendre(1), gauss_legendre(1)};
  const QuadRuleND r1 = tensor_rule(one);
  REQUIRE(r1.size() == 1);
  CHECK(r1.points[0][0] == 0.5);
  CHECK(r1.points[0][1] == 0.5);
  CHECK(r1.weights[0] == 1.0);

  const std::vector<QuadRule1D> two{gauss_legendre(2), gauss_legendre(2)};
  const QuadRuleND r2 = tensor_rule(two);
  REQUIRE(r2.size() == 4);
  double s = 0.0;
  for (std::size_t p = 0; p < r2.size(); ++p) {
    CHECK(r2.weights[p] == doctest::Approx(0.25).epsilon(1e-15));
    s += r2.weights[p] * std::pow(r2.points[p][0], 2) * std::pow(r2.points[p][1], 2);
  }
  CHECK(std::abs(s - 1.0 / 9.0) <= 1e-15);
  // first axis slowest
  CHECK(r2.points[0][0] == r2.points[1][0]);
  CHECK(r2.points[0][1] != r2.points[1][1]);

  CHECK_THROWS_AS(tensor_rule(std::vector<QuadRule1D>{}), ArgumentError);
  CHECK_THROWS_AS(tensor_rule(std::vector<QuadRule1D>(4, gauss_legendre(1))), ArgumentError);
}

TEST_CASE("tensor rules integrate separable monomials") {
  for (int n = 1; n <= 5; ++n) {
    const std::vector<QuadRule1D> axes(3, gauss_legendre(n));
    const QuadRuleND r = tensor_rule(axes);
    CHECK(r.size() == static_cast<std::size_t>(n * n * n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      for (int q = 0; q <= 2 * n - 1; q += 2) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
          s += r.weights[i] * std::pow(r.points[i][0], p) * std::pow(r.points[i][1], q) * r.points[i][2];
        }
        const double exact = 1.0 / ((p + 1.0) * (q + 1.0) * 2.0);
        CHECK(std::abs(s - exact) / exact <= 1e-12);
      }
    }
  }
}

TEST_CASE("map_rule") {
  Box cell;
  cell.dim = 1;
  cell.lower[0] = 0.0;
  cell.upper[0] = 2.0;
  const QuadRuleND m = map_rule(tensor_rule(std::vector<QuadRule1D>{gauss_legendre(1)}), cell);
  CHECK(m.points[0][0] == 1.0);
  CHECK(m.weights[0] == 2.0);

  Box ab;
  ab.dim = 1;
  ab.lower[0] = -0.7;
  ab.upper[0] = 1.3;
  const QuadRuleND g = map_rule(tensor_rule(std::vector<QuadRule1D>{gauss_legendre(2)}), ab);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.points[i][0], 3);
  const double exact = (std::pow(1.3, 4) - std::pow(-0.7, 4)) / 4.0;
  CHECK(std::abs(s - exact) <= 1e-14);

  Box box2;
  box2.dim = 2;
  box2.lower = {0.5, -1.0, 0.0};
  box2.upper = {0.75, 2.0, 0.0};
  const QuadRuleND w = map_rule(tensor_rule(std::vector<QuadRule1D>(2, gauss_legendre(3))), box2);
  double vol = 0.0;
  for (double x : w.weights) vol += x;
  CHECK(std::abs(vol - 0.75) <= 1e-14);

  Box bad = cell;
  bad.upper[0] = bad.lower[0];
  CHECK_THROWS_AS(map_rule(tensor_rule(std::vector<QuadRule1D>{gauss_legendre(1)}), bad), ArgumentError);
}
