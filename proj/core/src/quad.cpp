#include "wassfem/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wassfem/errors.hpp"

namespace wassfem {

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= extent(a);
  return v;
}

bool Box::contains(const Point& p, double tol) const {
  for (int a = 0; a < dim; ++a) {
    if (p[a] < lower[a] - tol || p[a] > upper[a] + tol) return false;
  }
  return true;
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadRule1D gauss_legendre(int n) {
  if (n < 1 || n > 16) throw ArgumentError("gauss_legendre: n must be in [1,16]");
  QuadRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.exact_degree = 2 * n - 1;
  if (n == 1) {
    rule.nodes[0] = 0.5;
    rule.weights[0] = 1.0;
    return rule;
  }
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    // descending cos -> reverse so nodes increase
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  // enforce exact symmetry about 1/2
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[i] + 1.0 - rule.nodes[n - 1 - i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = 1.0 - x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

QuadRule1D gauss_lobatto(int n) {
  if (n < 2 || n > 32) throw ArgumentError("gauss_lobatto: n must be in [2,32]");
  const int deg = n - 1;
  QuadRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.exact_degree = 2 * n - 3;
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / deg);
    if (i > 0 && i < deg) {
      for (int it = 0; it < 100; ++it) {
        double p = 0.0;
        double dp = 0.0;
        double pm = 0.0;
        double dpm = 0.0;
        legendre(deg, x, p, dp);
        legendre(deg - 1, x, pm, dpm);
        // Newton on (1-x^2) P_deg'(x); uses (1-x^2)P' = deg (P_{deg-1} - x P_deg)
        const double f = pm - x * p;
        const double df = -p - x * dp + dpm;
        const double dx = f / df;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
    }
    double p = 0.0;
    double dp = 0.0;
    legendre(deg, x, p, dp);
    rule.nodes[i] = 0.5 * (x + 1.0);
    rule.weights[i] = 1.0 / (deg * (deg + 1.0) * p * p);
  }
  rule.nodes.front() = 0.0;
  rule.nodes.back() = 1.0;
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[i] + 1.0 - rule.nodes[n - 1 - i]);
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = 1.0 - x;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

QuadRuleND tensor_rule(std::span<const QuadRule1D> axes) {
  if (axes.empty() || axes.size() > static_cast<std::size_t>(kMaxAxes)) {
    throw ArgumentError("tensor_rule: need between 1 and 3 axes");
  }
  QuadRuleND out;
  out.dim = static_cast<int>(axes.size());
  std::size_t total = 1;
  for (const auto& ax : axes) {
    if (ax.size() == 0) throw ArgumentError("tensor_rule: empty axis rule");
    total *= ax.size();
  }
  out.points.resize(total);
  out.weights.resize(total);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    Point p{};
    double w = 1.0;
    for (int a = out.dim - 1; a >= 0; --a) {
      const std::size_t n = axes[a].size();
      const std::size_t i = rem % n;
      rem /= n;
      p[a] = axes[a].nodes[i];
      w *= axes[a].weights[i];
    }
    out.points[lin] = p;
    out.weights[lin] = w;
  }
  return out;
}

QuadRuleND map_rule(const QuadRuleND& rule, const Box& cell) {
  if (cell.dim != rule.dim) throw ArgumentError("map_rule: dimension mismatch");
  for (int a = 0; a < cell.dim; ++a) {
    if (!(cell.extent(a) > 0.0)) throw ArgumentError("map_rule: degenerate cell");
  }
  QuadRuleND out = rule;
  const double vol = cell.volume();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    for (int a = 0; a < cell.dim; ++a) {
      out.points[q][a] = cell.lower[a] + cell.extent(a) * rule.points[q][a];
    }
    out.weights[q] = rule.weights[q] * vol;
  }
  return out;
}

}  // namespace wassfem
