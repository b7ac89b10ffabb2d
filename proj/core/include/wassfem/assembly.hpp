#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wassfem/fespace.hpp"
#include "wassfem/sparse.hpp"

namespace wassfem {

/// The three discrete spaces built from one mesh and integration degree k
/// (V has degree k + 1), plus the tables shared by every cell.
struct Discretization {
  std::shared_ptr<const SpaceTimeMesh> mesh;
  int k = 0;
  VSpace v;
  WSpace w;
  MSpace m;
  /// V basis at the W points of a cell; gradients are physical. Cells are
  /// congruent, so one table serves all of them.
  BasisTable w_table;
  TraceMap trace0;
  TraceMap trace1;

  Discretization(std::shared_ptr<const SpaceTimeMesh> mesh, int k);
  int dim() const { return v.dim(); }
};

/// Dense local stiffness (gradient-gradient) matrix of one space-time cell.
std::vector<double> local_stiffness(const VSpace& v);
/// Dense local mass matrix of the spatial face basis (t = 1 face).
std::vector<double> local_face_mass(const VSpace& v);

/// K_ij = integral of grad_{t,x} psi_i . grad_{t,x} psi_j, exact for the
/// tensor basis ((q+1)-point Gauss per axis).
SparseSymMatrix assemble_stiffness(const VSpace& v);
/// M1_ij = integral over the domain of psi_i(1,x) psi_j(1,x), exact.
SparseSymMatrix assemble_terminal_mass(const VSpace& v);

/// grad_{t,x} phi at every W point, as a (dim)-component W field.
CoefficientField gradient_samples(const Discretization& disc, std::span<const double> phi);
/// Discrete pairing < alpha, grad phi >_h.
double pairing_w_gradv(const Discretization& disc, const CoefficientField& alpha,
                       std::span<const double> phi);
/// out_i += < beta, grad psi_i >_h.
void add_w_gradv_load(const Discretization& disc, const CoefficientField& beta,
                      std::span<double> out);

/// Normal flux m . n on the lateral boundary: f(point, axis, side).
using BoundaryFlux = std::function<double(const Point&, int axis, int side)>;

/// out_i = integral over lateral facets of psi_i * flux, using a (k+1)-point
/// Gauss rule on every facet axis.
std::vector<double> boundary_source_load(const Discretization& disc, const BoundaryFlux& flux);

/// Inputs of the Step-A right-hand side. Terminal fields may be empty
/// (fixed terminal density without multiplier, i.e. MFP/OT).
struct StepARhsInputs {
  const CoefficientField* alpha = nullptr;
  const CoefficientField* alpha_star = nullptr;
  std::span<const double> rho0;
  std::span<const double> rho1;
  std::span<const double> rho1_star;
  std::span<const double> boundary_load;  // from boundary_source_load, optional
  double r1 = 1.0;
  double r2 = 0.0;
};

/// b_i = < r1 a* - a, grad psi_i >_h - (r2 rho1* - rho1, psi_i(1))_h
///       - (rho0, psi_i(0))_h + boundary_load_i
std::vector<double> assemble_stepA_rhs(const Discretization& disc, const StepARhsInputs& in);

}  // namespace wassfem
