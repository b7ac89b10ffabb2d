#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wassfem/mesh.hpp"
#include "wassfem/quad.hpp"

namespace wassfem {

/// Values and physical space-time gradients of the local basis of a cell at
/// a set of points. Gradient component 0 is d/dt, 1.. are spatial.
struct BasisTable {
  int num_points = 0;
  int num_local = 0;
  int dim = 0;
  std::vector<double> values;     // [p * num_local + i]
  std::vector<double> gradients;  // [(p * num_local + i) * dim + c]

  double value(int p, int i) const { return values[p * num_local + i]; }
  double grad(int p, int i, int c) const { return gradients[(p * num_local + i) * dim + c]; }
};

/// Lagrange basis on the given 1D nodes: values and derivatives at x.
void lagrange_basis(std::span<const double> nodes, double x, std::span<double> values,
                    std::span<double> derivatives);

/// Continuous space-time Q_q space (per-axis degree q) with Gauss-Lobatto
/// nodes. Local nodes are ordered lexicographically over (t, x[, y]) with the
/// last axis fastest; DOFs are the active nodes of the global node grid
/// numbered in the same order, so time is the slowest global index.
class VSpace {
 public:
  VSpace(std::shared_ptr<const SpaceTimeMesh> mesh, int degree);

  const SpaceTimeMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const SpaceTimeMesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int num_dofs() const { return num_dofs_; }
  int local_size() const { return local_size_; }
  std::span<const int> cell_dofs(int st_cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(st_cell) * local_size_,
            static_cast<std::size_t>(local_size_)};
  }
  /// Flattened local-to-global maps of all cells.
  std::span<const int> all_cell_dofs() const { return cell_dofs_; }
  const std::vector<double>& nodes_1d() const { return nodes_1d_; }
  /// Physical (t, x[, y]) coordinates of a DOF.
  Point dof_point(int dof) const;

  /// Basis on the unit reference box at reference points; gradients are
  /// with respect to reference coordinates.
  BasisTable eval_reference(std::span<const Point> ref_points) const;
  /// Basis of `st_cell` at physical points (which must lie in the cell).
  BasisTable eval_basis(int st_cell, const QuadRuleND& points) const;

  std::vector<double> interpolate(const std::function<double(const Point&)>& f) const;
  /// Evaluates a V field at a physical point inside `st_cell`.
  double evaluate(std::span<const double> coeffs, int st_cell, const Point& p) const;

 private:
  std::shared_ptr<const SpaceTimeMesh> mesh_;
  int degree_;
  int dim_;
  int local_size_;
  int num_dofs_ = 0;
  std::vector<double> nodes_1d_;
  std::array<int, kMaxAxes> node_grid_{1, 1, 1};
  std::vector<int> cell_dofs_;
  std::vector<int> dof_grid_;  // dof -> global node-grid linear index
};

/// Space-time integration-rule space: one DOF per Gauss point, (k+1) points
/// per axis per cell. DOF = st_cell * points_per_cell + p with the local
/// point p ordered time-slowest, i.e. p = i_t * N_k + i_s.
class WSpace {
 public:
  WSpace(std::shared_ptr<const SpaceTimeMesh> mesh, int degree);

  const SpaceTimeMesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int points_per_cell() const { return static_cast<int>(ref_rule_.size()); }
  int spatial_points_per_cell() const { return spatial_per_cell_; }
  int num_dofs() const { return mesh_->num_cells() * points_per_cell(); }
  /// Rule on the unit space-time box.
  const QuadRuleND& reference_rule() const { return ref_rule_; }
  /// Physical weight of local point p (identical on every cell).
  double weight(int p) const { return weights_[p]; }
  std::span<const double> weights() const { return weights_; }
  Point point(int dof) const;
  const QuadRule1D& rule_1d() const { return rule_1d_; }

 private:
  std::shared_ptr<const SpaceTimeMesh> mesh_;
  int degree_;
  int dim_;
  int spatial_per_cell_;
  QuadRule1D rule_1d_;
  QuadRuleND ref_rule_;
  std::vector<double> weights_;
};

/// Spatial integration-rule space: DOF = cell * N_k + i_s.
class MSpace {
 public:
  MSpace(std::shared_ptr<const SpaceTimeMesh> mesh, int degree);

  const SpatialMesh& spatial() const { return mesh_->spatial(); }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int points_per_cell() const { return static_cast<int>(ref_rule_.size()); }
  int num_dofs() const { return spatial().num_active() * points_per_cell(); }
  const QuadRuleND& reference_rule() const { return ref_rule_; }
  double weight(int p) const { return weights_[p]; }
  std::span<const double> weights() const { return weights_; }
  Point point(int dof) const;

 private:
  std::shared_ptr<const SpaceTimeMesh> mesh_;
  int degree_;
  int dim_;
  QuadRuleND ref_rule_;
  std::vector<double> weights_;
};

enum class SpaceKind { V, W, M };

/// Coefficient vector over a space. Vector-valued W fields store components
/// point-major: values[dof * components + c].
struct CoefficientField {
  SpaceKind space = SpaceKind::W;
  int components = 1;
  std::vector<double> values;

  CoefficientField() = default;
  CoefficientField(SpaceKind s, int ndofs, int ncomp = 1)
      : space(s), components(ncomp), values(static_cast<std::size_t>(ndofs) * ncomp, 0.0) {}

  std::size_t num_dofs() const { return values.size() / components; }
  double& operator()(std::size_t dof, int c = 0) { return values[dof * components + c]; }
  double operator()(std::size_t dof, int c = 0) const { return values[dof * components + c]; }
};

VSpace build_v_space(std::shared_ptr<const SpaceTimeMesh> mesh, int q);
WSpace build_w_space(std::shared_ptr<const SpaceTimeMesh> mesh, int k);
MSpace build_m_space(std::shared_ptr<const SpaceTimeMesh> mesh, int k);

/// Samples a scalar function at the points of a W or M space.
std::vector<double> sample_w(const WSpace& w, const std::function<double(const Point&)>& f);
std::vector<double> sample_m(const MSpace& m, const std::function<double(const Point&)>& f);

/// Restriction of a V field to the slice t = 0 or t = 1, evaluated at the
/// spatial quadrature points of an M space.
class TraceMap {
 public:
  TraceMap(const VSpace& v, const MSpace& m, double t);

  double time() const { return t_; }
  int face_size() const { return face_size_; }
  /// V DOFs on the slice for active spatial cell l.
  std::span<const int> face_dofs(int l) const {
    return {face_dofs_.data() + static_cast<std::size_t>(l) * face_size_,
            static_cast<std::size_t>(face_size_)};
  }
  std::span<const int> all_face_dofs() const { return face_dofs_; }
  /// Values of the face basis at the M points: [i_s * face_size + f].
  const std::vector<double>& table() const { return table_; }
  /// All distinct V DOFs with time coordinate t.
  std::vector<int> slice_dofs() const;

  /// phi(t, xi) at every M point.
  std::vector<double> apply(std::span<const double> phi) const;
  /// out[i] += sum over M points of weight * g(xi) * psi_i(t, xi).
  void add_weighted_transpose(std::span<const double> g, std::span<double> out) const;

 private:
  double t_;
  int num_cells_;
  int face_size_;
  int points_;
  std::vector<int> face_dofs_;
  std::vector<double> table_;
  std::vector<double> weights_;
};

TraceMap trace_map(const VSpace& v, const MSpace& m, double t);

}  // namespace wassfem
