#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wassfem/fespace.hpp"

namespace wassfem {

/// Interaction cost catalog. Values are the conventional case numbers.
enum class CostCase {
  Zero = 1,            // A = 0 (optimal transport)
  Quadratic = 2,       // A = c rho^2
  Entropy = 3,         // A = c rho log(c rho), A* = exp(s/c - 1)
  InverseDensity = 4,  // A = c / rho
  BoxConstraint = 5,   // A = indicator of [0, rho_max]
};

struct CostModel {
  CostCase kind = CostCase::Zero;
  double c = 0.1;
  double rho_max = 1.0;

  void validate() const;
};

std::string to_string(CostCase c);
CostCase cost_case_from_string(const std::string& s);

/// Value and derivative of a convex function; `finite` is false on the
/// +infinity branch (value is then +inf).
struct ConvexValue {
  double value = 0.0;
  double derivative = 0.0;
  bool finite = true;
};

/// Kinetic cost |m|^2 / (2 rho). rho <= eps counts as zero density.
double eval_L(double rho, std::span<const double> m, double eps = 1e-12);

ConvexValue eval_A(const CostModel& model, double rho);
ConvexValue eval_A_star(const CostModel& model, double s);

struct ProxAlphaResult {
  std::array<double, 3> a{};  // minimizer (a0, a1[, a2])
  double density = 0.0;       // rho = (A*)'(a0 + |a1|^2 / 2) at the minimizer
  int iterations = 0;
};

/// Minimizes A*(a0 + |a1|^2/2) + (r1/2)|a|^2 - b.a over a in R^{dim}
/// (dim = b.size(), 2 or 3). Reduces to a monotone scalar equation in the
/// density rho >= 0 (a0 = (b0 - rho)/r1, a1 = b1/(rho + r1)) solved by
/// bracketed Newton. `density_hint` seeds the iteration.
ProxAlphaResult prox_alpha(const CostModel& model, std::span<const double> b, double r1,
                           std::optional<double> density_hint = std::nullopt);

/// Objective of prox_alpha (possibly +inf).
double prox_alpha_objective(const CostModel& model, std::span<const double> a,
                            std::span<const double> b, double r1);

/// Terminal cost Gamma(rho) = (rho - rho_T)^2 / 2 for rho >= 0, +inf otherwise.
ConvexValue eval_Gamma(double rho_target, double rho);
/// Gamma*(y) = rho_T y + y^2/2 for y >= -rho_T, -rho_T^2/2 otherwise.
ConvexValue eval_Gamma_star(double rho_target, double y);

enum class TerminalProxDomain { Nonnegative, Real };

/// Minimizes Gamma*(y) + (r2/2) y^2 - b y over y >= 0 (Nonnegative) or
/// over the real line (Real). Closed form.
double prox_rho1(double rho_target, double b, double r2,
                 TerminalProxDomain domain = TerminalProxDomain::Nonnegative);

double prox_rho1_objective(double rho_target, double y, double b, double r2);

/// Sum of pointwise values with a finiteness flag.
struct FunctionalValue {
  double value = 0.0;
  bool finite = true;
  std::size_t infinite_points = 0;
};

/// F_h*(a*) = < A*(a0* + |a1*|^2/2), 1 >_h.
FunctionalValue eval_F_h_star(const CostModel& model, const WSpace& w,
                              const CoefficientField& alpha_star);
/// R_h*(rho1*) = (Gamma*(rho1*), 1)_h.
FunctionalValue eval_R_h_star(std::span<const double> rho_target, const MSpace& m,
                              std::span<const double> rho1_star);

}  // namespace wassfem
