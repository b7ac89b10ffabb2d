#include "wassfem/assembly.hpp"

#include "wassfem/errors.hpp"

namespace wassfem {

namespace {

constexpr int kMaxDegree = 7;  // local scratch arrays hold (k+2)^3 <= 729 entries

BasisTable table_at_w_points(const VSpace& v, const WSpace& w) {
  const BasisTable ref = v.eval_reference(w.reference_rule().points);
  BasisTable t = ref;
  const Box box = v.mesh().cell_box(0);
  for (int p = 0; p < t.num_points; ++p) {
    for (int i = 0; i < t.num_local; ++i) {
      for (int c = 0; c < t.dim; ++c) {
        t.gradients[(static_cast<std::size_t>(p) * t.num_local + i) * t.dim + c] /= box.extent(c);
      }
    }
  }
  return t;
}

void symmetrize(std::vector<double>& a, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (a[i * n + j] + a[j * n + i]);
      a[i * n + j] = a[j * n + i] = s;
    }
  }
}

}  // namespace

Discretization::Discretization(std::shared_ptr<const SpaceTimeMesh> mesh_in, int k_in)
    : mesh(std::move(mesh_in)),
      k(k_in),
      v(mesh, k_in + 1),
      w(mesh, k_in),
      m(mesh, k_in),
      w_table(table_at_w_points(v, w)),
      trace0(v, m, 0.0),
      trace1(v, m, 1.0) {
  if (k < 0 || k > kMaxDegree) throw ArgumentError("discretization: degree k must be in [0,7]");
}

std::vector<double> local_stiffness(const VSpace& v) {
  const int n = v.local_size();
  const int dim = v.dim();
  std::vector<QuadRule1D> axes(dim, gauss_legendre(v.degree() + 1));
  const QuadRuleND rule = map_rule(tensor_rule(axes), v.mesh().cell_box(0));
  const BasisTable t = v.eval_basis(0, rule);
  std::vector<double> K(static_cast<std::size_t>(n) * n, 0.0);
  for (int p = 0; p < t.num_points; ++p) {
    const double w = rule.weights[p];
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += t.grad(p, i, c) * t.grad(p, j, c);
        K[i * n + j] += w * s;
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) K[i * n + j] = K[j * n + i];
  return K;
}

std::vector<double> local_face_mass(const VSpace& v) {
  // integrate the face basis with a (q+1)-point rule per spatial axis
  const MSpace exact(v.mesh_ptr(), v.degree());
  const TraceMap tr(v, exact, 1.0);
  const int n = tr.face_size();
  const auto& tab = tr.table();
  std::vector<double> M(static_cast<std::size_t>(n) * n, 0.0);
  for (int p = 0; p < exact.points_per_cell(); ++p) {
    const double w = exact.weight(p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M[i * n + j] += w * tab[p * n + i] * tab[p * n + j];
    }
  }
  symmetrize(M, n);
  return M;
}

SparseSymMatrix assemble_stiffness(const VSpace& v) {
  const auto K = local_stiffness(v);
  return assemble_uniform_cells(v.num_dofs(), v.local_size(), v.all_cell_dofs(), K);
}

SparseSymMatrix assemble_terminal_mass(const VSpace& v) {
  const auto M = local_face_mass(v);
  const MSpace exact(v.mesh_ptr(), v.degree());
  const TraceMap tr(v, exact, 1.0);
  return assemble_uniform_cells(v.num_dofs(), tr.face_size(), tr.all_face_dofs(), M);
}

CoefficientField gradient_samples(const Discretization& disc, std::span<const double> phi) {
  const int dim = disc.dim();
  const int ppc = disc.w.points_per_cell();
  const int nloc = disc.v.local_size();
  const int ncells = disc.mesh->num_cells();
  CoefficientField g(SpaceKind::W, disc.w.num_dofs(), dim);
  const BasisTable& t = disc.w_table;
#ifdef WASSFEM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int c = 0; c < ncells; ++c) {
    const auto dofs = disc.v.cell_dofs(c);
    double local[729];
    for (int i = 0; i < nloc; ++i) local[i] = phi[dofs[i]];
    for (int p = 0; p < ppc; ++p) {
      double acc[kMaxAxes] = {0.0, 0.0, 0.0};
      const double* gp = t.gradients.data() + static_cast<std::size_t>(p) * nloc * dim;
      for (int i = 0; i < nloc; ++i) {
        for (int a = 0; a < dim; ++a) acc[a] += gp[i * dim + a] * local[i];
      }
      const std::size_t dof = static_cast<std::size_t>(c) * ppc + p;
      for (int a = 0; a < dim; ++a) g(dof, a) = acc[a];
    }
  }
  return g;
}

double pairing_w_gradv(const Discretization& disc, const CoefficientField& alpha,
                       std::span<const double> phi) {
  if (alpha.num_dofs() != static_cast<std::size_t>(disc.w.num_dofs()) ||
      alpha.components != disc.dim() || phi.size() != static_cast<std::size_t>(disc.v.num_dofs())) {
    throw ArgumentError("pairing_w_gradv: field/space mismatch");
  }
  const CoefficientField g = gradient_samples(disc, phi);
  const int ppc = disc.w.points_per_cell();
  double s = 0.0;
  for (std::size_t d = 0; d < g.num_dofs(); ++d) {
    double dot = 0.0;
    for (int a = 0; a < g.components; ++a) dot += alpha(d, a) * g(d, a);
    s += disc.w.weight(static_cast<int>(d % ppc)) * dot;
  }
  return s;
}

void add_w_gradv_load(const Discretization& disc, const CoefficientField& beta,
                      std::span<double> out) {
  const int dim = disc.dim();
  const int ppc = disc.w.points_per_cell();
  const int nloc = disc.v.local_size();
  const int ncells = disc.mesh->num_cells();
  const BasisTable& t = disc.w_table;
  for (int c = 0; c < ncells; ++c) {
    const auto dofs = disc.v.cell_dofs(c);
    double local[729] = {};
    for (int p = 0; p < ppc; ++p) {
      const std::size_t dof = static_cast<std::size_t>(c) * ppc + p;
      const double w = disc.w.weight(p);
      double bw[kMaxAxes];
      for (int a = 0; a < dim; ++a) bw[a] = w * beta(dof, a);
      const double* gp = t.gradients.data() + static_cast<std::size_t>(p) * nloc * dim;
      for (int i = 0; i < nloc; ++i) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += gp[i * dim + a] * bw[a];
        local[i] += s;
      }
    }
    for (int i = 0; i < nloc; ++i) out[dofs[i]] += local[i];
  }
}

std::vector<double> boundary_source_load(const Discretization& disc, const BoundaryFlux& flux) {
  const VSpace& v = disc.v;
  const int dim = v.dim();
  std::vector<double> out(v.num_dofs(), 0.0);
  const QuadRule1D g = gauss_legendre(disc.k + 1);
  for (const LateralFacet& f : boundary_facets(*disc.mesh)) {
    const int st = disc.mesh->cell_index(f.interval, f.cell);
    const Box box = disc.mesh->cell_box(st);
    const int normal_axis = f.axis + 1;
    std::vector<QuadRule1D> axes(dim, g);
    axes[normal_axis] = QuadRule1D{{f.side > 0 ? 1.0 : 0.0}, {1.0}, 0};
    QuadRuleND rule = map_rule(tensor_rule(axes), box);
    const double h = box.extent(normal_axis);
    const BasisTable t = v.eval_basis(st, rule);
    const auto dofs = v.cell_dofs(st);
    for (std::size_t p = 0; p < rule.size(); ++p) {
      const double w = rule.weights[p] / h * flux(rule.points[p], f.axis, f.side);
      for (int i = 0; i < t.num_local; ++i) out[dofs[i]] += w * t.value(static_cast<int>(p), i);
    }
  }
  return out;
}

std::vector<double> assemble_stepA_rhs(const Discretization& disc, const StepARhsInputs& in) {
  const std::size_t nw = disc.w.num_dofs();
  const std::size_t nm = disc.m.num_dofs();
  const auto w_ok = [&](const CoefficientField* f) {
    return f && f->space == SpaceKind::W && f->num_dofs() == nw && f->components == disc.dim();
  };
  if (!w_ok(in.alpha) || !w_ok(in.alpha_star)) throw ArgumentError("stepA rhs: W field mismatch");
  if (in.rho0.size() != nm) throw ArgumentError("stepA rhs: rho0 size mismatch");
  if (!in.rho1.empty() && in.rho1.size() != nm) throw ArgumentError("stepA rhs: rho1 size mismatch");
  if (!in.rho1_star.empty() && in.rho1_star.size() != nm) {
    throw ArgumentError("stepA rhs: rho1* size mismatch");
  }
  if (!in.boundary_load.empty() && in.boundary_load.size() != static_cast<std::size_t>(disc.v.num_dofs())) {
    throw ArgumentError("stepA rhs: boundary load size mismatch");
  }

  std::vector<double> b(disc.v.num_dofs(), 0.0);
  CoefficientField beta(SpaceKind::W, static_cast<int>(nw), disc.dim());
  for (std::size_t i = 0; i < beta.values.size(); ++i) {
    beta.values[i] = in.r1 * in.alpha_star->values[i] - in.alpha->values[i];
  }
  add_w_gradv_load(disc, beta, b);

  if (!in.rho1.empty() || !in.rho1_star.empty()) {
    std::vector<double> g1(nm, 0.0);
    for (std::size_t i = 0; i < nm; ++i) {
      const double r1v = in.rho1.empty() ? 0.0 : in.rho1[i];
      const double rs = in.rho1_star.empty() ? 0.0 : in.rho1_star[i];
      g1[i] = r1v - in.r2 * rs;
    }
    disc.trace1.add_weighted_transpose(g1, b);
  }
  std::vector<double> neg_rho0(in.rho0.begin(), in.rho0.end());
  for (double& x : neg_rho0) x = -x;
  disc.trace0.add_weighted_transpose(neg_rho0, b);
  if (!in.boundary_load.empty()) {
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += in.boundary_load[i];
  }
  return b;
}

}  // namespace wassfem
