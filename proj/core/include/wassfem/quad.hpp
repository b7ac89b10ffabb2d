#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace wassfem {

/// Maximum number of tensor axes (time plus two spatial axes).
inline constexpr int kMaxAxes = 3;

using Point = std::array<double, kMaxAxes>;

/// Axis-aligned box in up to three dimensions. Unused trailing axes are ignored.
struct Box {
  int dim = 1;
  Point lower{};
  Point upper{};

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  double volume() const;
  bool contains(const Point& p, double tol = 0.0) const;
};

/// Quadrature rule on [0,1].
struct QuadRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Tensor-product quadrature rule. Points are stored lexicographically with
/// the first axis varying slowest.
struct QuadRuleND {
  int dim = 0;
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [0,1], 1 <= n <= 16.
QuadRule1D gauss_legendre(int n);

/// n-point Gauss-Lobatto nodes on [0,1] (endpoints included), n >= 2.
/// Used as interpolation nodes, so the rule keeps its weights too.
QuadRule1D gauss_lobatto(int n);

QuadRuleND tensor_rule(std::span<const QuadRule1D> axes);

/// Affinely maps a rule on the unit box onto `cell`, scaling weights by the
/// cell volume.
QuadRuleND map_rule(const QuadRuleND& rule, const Box& cell);

}  // namespace wassfem
