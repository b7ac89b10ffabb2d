#include "wassfem/fespace.hpp"

#include <algorithm>
#include <cmath>

#include "wassfem/errors.hpp"

namespace wassfem {

void lagrange_basis(std::span<const double> nodes, double x, std::span<double> values,
                    std::span<double> derivatives) {
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1.0;
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double inv = 1.0 / (nodes[i] - nodes[j]);
      d = d * (x - nodes[j]) * inv + v * inv;
      v *= (x - nodes[j]) * inv;
    }
    values[i] = v;
    if (!derivatives.empty()) derivatives[i] = d;
  }
}

namespace {

int ipow(int base, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Decomposes a lexicographic index (last axis fastest) into per-axis indices.
std::array<int, kMaxAxes> unrank(int lin, int dim, const std::array<int, kMaxAxes>& sizes) {
  std::array<int, kMaxAxes> mi{};
  for (int a = dim - 1; a >= 0; --a) {
    mi[a] = lin % sizes[a];
    lin /= sizes[a];
  }
  return mi;
}

int rank(const std::array<int, kMaxAxes>& mi, int dim, const std::array<int, kMaxAxes>& sizes) {
  int lin = 0;
  for (int a = 0; a < dim; ++a) lin = lin * sizes[a] + mi[a];
  return lin;
}

std::array<int, kMaxAxes> uniform_sizes(int n) { return {n, n, n}; }

}  // namespace

VSpace::VSpace(std::shared_ptr<const SpaceTimeMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (degree < 1) throw ArgumentError("V space: degree must be >= 1");
  const SpatialMesh& sm = mesh_->spatial();
  dim_ = sm.dim() + 1;
  local_size_ = ipow(degree_ + 1, dim_);
  nodes_1d_ = gauss_lobatto(degree_ + 1).nodes;

  node_grid_ = {1, 1, 1};
  node_grid_[0] = mesh_->num_intervals() * degree_ + 1;
  for (int a = 0; a < sm.dim(); ++a) node_grid_[a + 1] = sm.cells_per_axis(a) * degree_ + 1;
  int total = 1;
  for (int a = 0; a < dim_; ++a) total *= node_grid_[a];

  const auto local_sizes = uniform_sizes(degree_ + 1);
  const int ncells = mesh_->num_cells();
  std::vector<int> cell_grid(static_cast<std::size_t>(ncells) * local_size_);
  std::vector<int> grid_to_dof(total, -1);
  for (int j = 0; j < mesh_->num_intervals(); ++j) {
    for (int l = 0; l < sm.num_active(); ++l) {
      const auto smi = sm.multi_index(sm.grid_index(l));
      const int c = mesh_->cell_index(j, l);
      for (int i = 0; i < local_size_; ++i) {
        auto li = unrank(i, dim_, local_sizes);
        std::array<int, kMaxAxes> gi{};
        gi[0] = j * degree_ + li[0];
        for (int a = 0; a < sm.dim(); ++a) gi[a + 1] = smi[a] * degree_ + li[a + 1];
        const int g = rank(gi, dim_, node_grid_);
        cell_grid[static_cast<std::size_t>(c) * local_size_ + i] = g;
        grid_to_dof[g] = 0;
      }
    }
  }
  for (int g = 0; g < total; ++g) {
    if (grid_to_dof[g] == 0) {
      grid_to_dof[g] = num_dofs_++;
      dof_grid_.push_back(g);
    }
  }
  cell_dofs_.resize(cell_grid.size());
  for (std::size_t i = 0; i < cell_grid.size(); ++i) cell_dofs_[i] = grid_to_dof[cell_grid[i]];
}

Point VSpace::dof_point(int dof) const {
  const auto gi = unrank(dof_grid_[dof], dim_, node_grid_);
  const SpatialMesh& sm = mesh_->spatial();
  Point p{};
  auto coord = [&](int g, double lower, double h) {
    return lower + (g / degree_) * h + nodes_1d_[g % degree_] * h;
  };
  p[0] = coord(gi[0], 0.0, mesh_->dt());
  for (int a = 0; a < sm.dim(); ++a) {
    p[a + 1] = coord(gi[a + 1], sm.domain().lower[a], sm.spacing(a));
  }
  return p;
}

BasisTable VSpace::eval_reference(std::span<const Point> ref_points) const {
  const int n1 = degree_ + 1;
  BasisTable t;
  t.num_points = static_cast<int>(ref_points.size());
  t.num_local = local_size_;
  t.dim = dim_;
  t.values.resize(static_cast<std::size_t>(t.num_points) * local_size_);
  t.gradients.resize(t.values.size() * dim_);
  std::vector<double> val(static_cast<std::size_t>(dim_) * n1);
  std::vector<double> der(val.size());
  const auto local_sizes = uniform_sizes(n1);
  for (int p = 0; p < t.num_points; ++p) {
    for (int a = 0; a < dim_; ++a) {
      lagrange_basis(nodes_1d_, ref_points[p][a], std::span(val).subspan(a * n1, n1),
                     std::span(der).subspan(a * n1, n1));
    }
    for (int i = 0; i < local_size_; ++i) {
      const auto li = unrank(i, dim_, local_sizes);
      double v = 1.0;
      for (int a = 0; a < dim_; ++a) v *= val[a * n1 + li[a]];
      t.values[static_cast<std::size_t>(p) * local_size_ + i] = v;
      for (int c = 0; c < dim_; ++c) {
        double g = 1.0;
        for (int a = 0; a < dim_; ++a) g *= (a == c) ? der[a * n1 + li[a]] : val[a * n1 + li[a]];
        t.gradients[(static_cast<std::size_t>(p) * local_size_ + i) * dim_ + c] = g;
      }
    }
  }
  return t;
}

BasisTable VSpace::eval_basis(int st_cell, const QuadRuleND& points) const {
  if (points.dim != dim_) throw ArgumentError("eval_basis: point dimension mismatch");
  const Box box = mesh_->cell_box(st_cell);
  std::vector<Point> ref(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!box.contains(points.points[p], 1e-12)) {
      throw ArgumentError("eval_basis: point outside cell");
    }
    for (int a = 0; a < dim_; ++a) {
      ref[p][a] = (points.points[p][a] - box.lower[a]) / box.extent(a);
    }
  }
  BasisTable t = eval_reference(ref);
  for (int p = 0; p < t.num_points; ++p) {
    for (int i = 0; i < t.num_local; ++i) {
      for (int c = 0; c < dim_; ++c) {
        t.gradients[(static_cast<std::size_t>(p) * t.num_local + i) * dim_ + c] /= box.extent(c);
      }
    }
  }
  return t;
}

std::vector<double> VSpace::interpolate(const std::function<double(const Point&)>& f) const {
  std::vector<double> out(num_dofs_);
  for (int d = 0; d < num_dofs_; ++d) out[d] = f(dof_point(d));
  return out;
}

double VSpace::evaluate(std::span<const double> coeffs, int st_cell, const Point& p) const {
  QuadRuleND single;
  single.dim = dim_;
  single.points = {p};
  single.weights = {1.0};
  const BasisTable t = eval_basis(st_cell, single);
  const auto dofs = cell_dofs(st_cell);
  double v = 0.0;
  for (int i = 0; i < local_size_; ++i) v += t.values[i] * coeffs[dofs[i]];
  return v;
}

WSpace::WSpace(std::shared_ptr<const SpaceTimeMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (degree < 0) throw ArgumentError("W space: degree must be >= 0");
  dim_ = mesh_->space_time_dim();
  rule_1d_ = gauss_legendre(degree_ + 1);
  std::vector<QuadRule1D> axes(dim_, rule_1d_);
  ref_rule_ = tensor_rule(axes);
  spatial_per_cell_ = ipow(degree_ + 1, dim_ - 1);
  const double vol = mesh_->dt() * mesh_->spatial().cell_volume();
  weights_.resize(ref_rule_.size());
  for (std::size_t p = 0; p < ref_rule_.size(); ++p) weights_[p] = ref_rule_.weights[p] * vol;
}

Point WSpace::point(int dof) const {
  const int ppc = points_per_cell();
  const Box box = mesh_->cell_box(dof / ppc);
  const Point& r = ref_rule_.points[dof % ppc];
  Point p{};
  for (int a = 0; a < dim_; ++a) p[a] = box.lower[a] + box.extent(a) * r[a];
  return p;
}

MSpace::MSpace(std::shared_ptr<const SpaceTimeMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (degree < 0) throw ArgumentError("M space: degree must be >= 0");
  dim_ = mesh_->spatial().dim();
  std::vector<QuadRule1D> axes(dim_, gauss_legendre(degree_ + 1));
  ref_rule_ = tensor_rule(axes);
  const double vol = mesh_->spatial().cell_volume();
  weights_.resize(ref_rule_.size());
  for (std::size_t p = 0; p < ref_rule_.size(); ++p) weights_[p] = ref_rule_.weights[p] * vol;
}

Point MSpace::point(int dof) const {
  const int ppc = points_per_cell();
  const Box box = spatial().cell_box(dof / ppc);
  const Point& r = ref_rule_.points[dof % ppc];
  Point p{};
  for (int a = 0; a < dim_; ++a) p[a] = box.lower[a] + box.extent(a) * r[a];
  return p;
}

VSpace build_v_space(std::shared_ptr<const SpaceTimeMesh> mesh, int q) {
  return VSpace(std::move(mesh), q);
}
WSpace build_w_space(std::shared_ptr<const SpaceTimeMesh> mesh, int k) {
  return WSpace(std::move(mesh), k);
}
MSpace build_m_space(std::shared_ptr<const SpaceTimeMesh> mesh, int k) {
  return MSpace(std::move(mesh), k);
}

std::vector<double> sample_w(const WSpace& w, const std::function<double(const Point&)>& f) {
  std::vector<double> out(w.num_dofs());
  for (int d = 0; d < w.num_dofs(); ++d) out[d] = f(w.point(d));
  return out;
}

std::vector<double> sample_m(const MSpace& m, const std::function<double(const Point&)>& f) {
  std::vector<double> out(m.num_dofs());
  for (int d = 0; d < m.num_dofs(); ++d) out[d] = f(m.point(d));
  return out;
}

TraceMap::TraceMap(const VSpace& v, const MSpace& m, double t) : t_(t) {
  if (t != 0.0 && t != 1.0) throw ArgumentError("trace_map: t must be 0 or 1");
  const SpaceTimeMesh& mesh = v.mesh();
  const int sdim = mesh.spatial().dim();
  const int n1 = v.degree() + 1;
  face_size_ = ipow(n1, sdim);
  points_ = m.points_per_cell();
  num_cells_ = mesh.spatial().num_active();
  const int interval = (t == 0.0) ? 0 : mesh.num_intervals() - 1;
  const int offset = (t == 0.0) ? 0 : v.degree() * face_size_;
  face_dofs_.resize(static_cast<std::size_t>(num_cells_) * face_size_);
  for (int l = 0; l < num_cells_; ++l) {
    const auto dofs = v.cell_dofs(mesh.cell_index(interval, l));
    for (int f = 0; f < face_size_; ++f) {
      face_dofs_[static_cast<std::size_t>(l) * face_size_ + f] = dofs[offset + f];
    }
  }
  table_.resize(static_cast<std::size_t>(points_) * face_size_);
  std::vector<double> val(static_cast<std::size_t>(sdim) * n1);
  const auto sizes = uniform_sizes(n1);
  for (int p = 0; p < points_; ++p) {
    for (int a = 0; a < sdim; ++a) {
      lagrange_basis(v.nodes_1d(), m.reference_rule().points[p][a],
                     std::span(val).subspan(a * n1, n1), {});
    }
    for (int f = 0; f < face_size_; ++f) {
      const auto li = unrank(f, sdim, sizes);
      double prod = 1.0;
      for (int a = 0; a < sdim; ++a) prod *= val[a * n1 + li[a]];
      table_[static_cast<std::size_t>(p) * face_size_ + f] = prod;
    }
  }
  weights_.assign(m.weights().begin(), m.weights().end());
}

std::vector<int> TraceMap::slice_dofs() const {
  std::vector<int> out(face_dofs_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> TraceMap::apply(std::span<const double> phi) const {
  std::vector<double> out(static_cast<std::size_t>(num_cells_) * points_, 0.0);
  for (int l = 0; l < num_cells_; ++l) {
    const auto dofs = face_dofs(l);
    for (int p = 0; p < points_; ++p) {
      const double* row = table_.data() + static_cast<std::size_t>(p) * face_size_;
      double s = 0.0;
      for (int f = 0; f < face_size_; ++f) s += row[f] * phi[dofs[f]];
      out[static_cast<std::size_t>(l) * points_ + p] = s;
    }
  }
  return out;
}

void TraceMap::add_weighted_transpose(std::span<const double> g, std::span<double> out) const {
  for (int l = 0; l < num_cells_; ++l) {
    const auto dofs = face_dofs(l);
    for (int p = 0; p < points_; ++p) {
      const double gw = g[static_cast<std::size_t>(l) * points_ + p] * weights_[p];
      const double* row = table_.data() + static_cast<std::size_t>(p) * face_size_;
      for (int f = 0; f < face_size_; ++f) out[dofs[f]] += gw * row[f];
    }
  }
}

TraceMap trace_map(const VSpace& v, const MSpace& m, double t) { return TraceMap(v, m, t); }

}  // namespace wassfem
