#include "wassfem/costs.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wassfem/errors.hpp"

namespace wassfem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConvexValue infinite() { return {kInf, kInf, false}; }

// s(rho) = (b0 - rho)/r + B / (2 (rho + r)^2), B = |b1|^2; strictly decreasing.
struct Reduced {
  double b0;
  double B;
  double r;
  double s(double rho) const { return (b0 - rho) / r + B / (2.0 * (rho + r) * (rho + r)); }
  double ds(double rho) const {
    const double q = rho + r;
    return -1.0 / r - B / (q * q * q);
  }
};

// Root of a decreasing function g on [lo, hi] with g(lo) >= 0 >= g(hi),
// by Newton steps safeguarded with bisection.
template <class G>
double bracketed_newton(G&& g, double lo, double hi, double x, int& iters) {
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (iters = 0; iters < 100; ++iters) {
    double val = 0.0;
    double der = 0.0;
    g(x, val, der);
    if (val == 0.0) return x;
    if (val > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = (der < 0.0) ? x - val / der : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  std::ostringstream os;
  os << "prox_alpha: root bracket [" << lo << ", " << hi << "] did not converge";
  throw ProxError(os.str());
}

}  // namespace

void CostModel::validate() const {
  if (!(c > 0.0)) throw ArgumentError("cost model: c must be positive");
  if (!(rho_max > 0.0)) throw ArgumentError("cost model: rho_max must be positive");
}

std::string to_string(CostCase c) {
  switch (c) {
    case CostCase::Zero: return "zero";
    case CostCase::Quadratic: return "quadratic";
    case CostCase::Entropy: return "entropy";
    case CostCase::InverseDensity: return "inverse_density";
    case CostCase::BoxConstraint: return "box";
  }
  return "unknown";
}

CostCase cost_case_from_string(const std::string& s) {
  if (s == "zero" || s == "1") return CostCase::Zero;
  if (s == "quadratic" || s == "2") return CostCase::Quadratic;
  if (s == "entropy" || s == "3") return CostCase::Entropy;
  if (s == "inverse_density" || s == "4") return CostCase::InverseDensity;
  if (s == "box" || s == "5") return CostCase::BoxConstraint;
  throw ArgumentError("unknown cost case '" + s + "'");
}

double eval_L(double rho, std::span<const double> m, double eps) {
  if (rho < 0.0) throw ArgumentError("eval_L: negative density");
  double mm = 0.0;
  for (double x : m) mm += x * x;
  if (rho <= eps) return mm == 0.0 ? 0.0 : kInf;
  return mm / (2.0 * rho);
}

ConvexValue eval_A(const CostModel& model, double rho) {
  if (rho < 0.0) return infinite();
  const double c = model.c;
  switch (model.kind) {
    case CostCase::Zero: return {0.0, 0.0, true};
    case CostCase::Quadratic: return {c * rho * rho, 2.0 * c * rho, true};
    case CostCase::Entropy:
      // conjugate pair of exp(s/c - 1)
      if (rho == 0.0) return {0.0, -kInf, true};
      return {c * rho * std::log(c * rho), c * (std::log(c * rho) + 1.0), true};
    case CostCase::InverseDensity:
      if (rho == 0.0) return infinite();
      return {c / rho, -c / (rho * rho), true};
    case CostCase::BoxConstraint:
      if (rho > model.rho_max) return infinite();
      return {0.0, 0.0, true};
  }
  return infinite();
}

ConvexValue eval_A_star(const CostModel& model, double s) {
  const double c = model.c;
  switch (model.kind) {
    case CostCase::Zero:
      if (s > 0.0) return infinite();
      return {0.0, 0.0, true};
    case CostCase::Quadratic:
      if (s > 0.0) return {s * s / (4.0 * c), s / (2.0 * c), true};
      return {0.0, 0.0, true};
    case CostCase::Entropy: {
      const double e = std::exp(s / c - 1.0);
      return {e, e / c, true};
    }
    case CostCase::InverseDensity:
      if (s > 0.0) return infinite();
      if (s == 0.0) return {0.0, kInf, true};
      return {-2.0 * std::sqrt(-c * s), std::sqrt(c / (-s)), true};
    case CostCase::BoxConstraint:
      if (s > 0.0) return {model.rho_max * s, model.rho_max, true};
      return {0.0, 0.0, true};
  }
  return infinite();
}

ProxAlphaResult prox_alpha(const CostModel& model, std::span<const double> b, double r1,
                           std::optional<double> density_hint) {
  if (!(r1 > 0.0)) throw ArgumentError("prox_alpha: r1 must be positive");
  if (b.size() < 2 || b.size() > 3) throw ArgumentError("prox_alpha: b must have 2 or 3 entries");
  const std::size_t n = b.size();
  double B = 0.0;
  for (std::size_t i = 1; i < n; ++i) B += b[i] * b[i];
  const Reduced red{b[0], B, r1};
  const double c = model.c;

  double rho = 0.0;
  int iters = 0;
  switch (model.kind) {
    case CostCase::Zero:
    case CostCase::Quadratic:
    case CostCase::BoxConstraint: {
      if (red.s(0.0) <= 0.0) break;  // density zero, unconstrained point feasible
      const double slope = model.kind == CostCase::Quadratic ? 2.0 * c : 0.0;
      double hi = b[0] + B / (2.0 * r1);
      if (model.kind == CostCase::BoxConstraint) {
        if (red.s(model.rho_max) >= 0.0) {
          rho = model.rho_max;
          break;
        }
        hi = std::min(hi, model.rho_max);
      }
      auto g = [&](double x, double& v, double& d) {
        v = red.s(x) - slope * x;
        d = red.ds(x) - slope;
      };
      rho = bracketed_newton(g, 0.0, hi, density_hint.value_or(0.5 * hi), iters);
      break;
    }
    case CostCase::Entropy: {
      // in u = log rho: s(e^u) - c (u + log c + 1) = 0
      const double lc = std::log(c);
      const double rho_hi = std::max(b[0] + B / (2.0 * r1), std::exp(-1.0) / c);
      const double u_hi = std::log(rho_hi);
      const double u_lo = std::min(red.s(rho_hi) / c - lc - 2.0, u_hi - 1.0);
      auto g = [&](double u, double& v, double& d) {
        const double e = std::exp(u);
        v = red.s(e) - c * (u + lc + 1.0);
        d = red.ds(e) * e - c;
      };
      const double u0 = density_hint && *density_hint > 0.0 ? std::log(*density_hint) : 0.5 * (u_lo + u_hi);
      rho = std::exp(bracketed_newton(g, u_lo, u_hi, u0, iters));
      break;
    }
    case CostCase::InverseDensity: {
      // in u = log rho: s(e^u) + c e^{-2u} = 0
      const double P = std::max(b[0] + B / (2.0 * r1), 0.0);
      const double rho_hi = P + std::cbrt(2.0 * c * r1);
      const double s_hi = red.s(rho_hi);
      double rho_lo = 0.5 * rho_hi;
      if (s_hi < 0.0) rho_lo = 0.5 * std::min(rho_hi, std::sqrt(c / -s_hi));
      const double u_hi = std::log(rho_hi);
      const double u_lo = std::log(rho_lo);
      auto g = [&](double u, double& v, double& d) {
        const double e = std::exp(u);
        const double inv2 = std::exp(-2.0 * u);
        v = red.s(e) + c * inv2;
        d = red.ds(e) * e - 2.0 * c * inv2;
      };
      const double u0 = density_hint && *density_hint > 0.0 ? std::log(*density_hint) : 0.5 * (u_lo + u_hi);
      rho = std::exp(bracketed_newton(g, u_lo, u_hi, u0, iters));
      break;
    }
  }

  ProxAlphaResult out;
  out.density = rho;
  out.iterations = iters;
  out.a[0] = (b[0] - rho) / r1;
  for (std::size_t i = 1; i < n; ++i) out.a[i] = b[i] / (rho + r1);
  if (model.kind == CostCase::Zero || model.kind == CostCase::InverseDensity) {
    // land exactly inside the domain s <= 0
    double half = 0.0;
    for (std::size_t i = 1; i < n; ++i) half += 0.5 * out.a[i] * out.a[i];
    if (out.a[0] + half > 0.0) out.a[0] = -half;
  }
  return out;
}

double prox_alpha_objective(const CostModel& model, std::span<const double> a,
                            std::span<const double> b, double r1) {
  double half_a1 = 0.0;
  double aa = 0.0;
  double ba = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) half_a1 += 0.5 * a[i] * a[i];
    aa += a[i] * a[i];
    ba += b[i] * a[i];
  }
  const ConvexValue as = eval_A_star(model, a[0] + half_a1);
  if (!as.finite) return kInf;
  return as.value + 0.5 * r1 * aa - ba;
}

ConvexValue eval_Gamma(double rho_target, double rho) {
  if (rho < 0.0) return infinite();
  return {0.5 * (rho - rho_target) * (rho - rho_target), rho - rho_target, true};
}

ConvexValue eval_Gamma_star(double rho_target, double y) {
  if (y >= -rho_target) return {rho_target * y + 0.5 * y * y, rho_target + y, true};
  return {-0.5 * rho_target * rho_target, 0.0, true};
}

double prox_rho1(double rho_target, double b, double r2, TerminalProxDomain domain) {
  if (!(r2 > 0.0)) throw ArgumentError("prox_rho1: r2 must be positive");
  if (domain == TerminalProxDomain::Nonnegative) {
    return std::max(0.0, (b - rho_target) / (1.0 + r2));
  }
  if (b >= -r2 * rho_target) return (b - rho_target) / (1.0 + r2);
  return b / r2;
}

double prox_rho1_objective(double rho_target, double y, double b, double r2) {
  return eval_Gamma_star(rho_target, y).value + 0.5 * r2 * y * y - b * y;
}

FunctionalValue eval_F_h_star(const CostModel& model, const WSpace& w,
                              const CoefficientField& alpha_star) {
  if (alpha_star.num_dofs() != static_cast<std::size_t>(w.num_dofs())) {
    throw ArgumentError("eval_F_h_star: field/space mismatch");
  }
  FunctionalValue out;
  const int ppc = w.points_per_cell();
  for (std::size_t d = 0; d < alpha_star.num_dofs(); ++d) {
    double s = alpha_star(d, 0);
    for (int a = 1; a < alpha_star.components; ++a) s += 0.5 * alpha_star(d, a) * alpha_star(d, a);
    const ConvexValue v = eval_A_star(model, s);
    if (!v.finite) {
      ++out.infinite_points;
      continue;
    }
    out.value += w.weight(static_cast<int>(d % ppc)) * v.value;
  }
  if (out.infinite_points > 0) {
    out.finite = false;
    out.value = kInf;
  }
  return out;
}

FunctionalValue eval_R_h_star(std::span<const double> rho_target, const MSpace& m,
                              std::span<const double> rho1_star) {
  if (rho1_star.size() != static_cast<std::size_t>(m.num_dofs()) || rho_target.size() != rho1_star.size()) {
    throw ArgumentError("eval_R_h_star: field/space mismatch");
  }
  FunctionalValue out;
  const int ppc = m.points_per_cell();
  for (std::size_t d = 0; d < rho1_star.size(); ++d) {
    out.value += m.weight(static_cast<int>(d % ppc)) * eval_Gamma_star(rho_target[d], rho1_star[d]).value;
  }
  return out;
}

}  // namespace wassfem
