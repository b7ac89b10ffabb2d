#include <algorithm>
#include <cmath>

#include "wassfem/alg2.hpp"
#include "wassfem/errors.hpp"

namespace wassfem {
namespace {
constexpr int kErrorPoints = 10;
}

Metrics metrics(const Discretization& disc, const ProblemSpec& spec, const Alg2State& state,
                double density_floor) {
  const WSpace& w = disc.w;
  const MSpace& m = disc.m;
  const int dim = disc.dim();
  const int nw = w.num_dofs();
  if (state.alpha.num_dofs() != static_cast<std::size_t>(nw) || state.alpha.components != dim) {
    throw ArgumentError("metrics: state does not match the discretization");
  }
  const int ppc = w.points_per_cell();
  const int nk = w.spatial_points_per_cell();
  const int nl = disc.mesh->spatial().num_active();
  const int nt = disc.mesh->num_intervals();
  const int kt = ppc / nk;
  Metrics out;

  double e_rho = 0.0, e_m = 0.0, w2 = 0.0;
  double kkt = 0.0, kkt_mass = 0.0;
  for (int dof = 0; dof < nw; ++dof) {
    const double wt = w.weight(dof % ppc);
    const double rho = state.alpha(dof, 0);
    double mm = 0.0;
    for (int a = 1; a < dim; ++a) mm += state.alpha(dof, a) * state.alpha(dof, a);
    const double rf = std::max(rho, density_floor);
    w2 += wt * mm / (2.0 * rf);
    if (rho > density_floor && !state.grad_phi.values.empty()) {
      double r2 = 0.0;
      for (int a = 1; a < dim; ++a) {
        const double d = state.alpha(dof, a) / rho - state.grad_phi(dof, a);
        r2 += d * d;
      }
      kkt += wt * rho * r2;
      kkt_mass += wt * rho;
    }
  }
  out.w2 = w2;
  out.kkt_velocity = kkt_mass > 0.0 ? std::sqrt(kkt / kkt_mass) : 0.0;
  if (spec.exact) {
    // alpha is the per-cell tensor polynomial through its Gauss points
    const int n = disc.k + 1;
    const QuadRule1D fine = gauss_legendre(kErrorPoints);
    std::vector<double> basis(static_cast<std::size_t>(kErrorPoints) * n), deriv(n);
    for (int q = 0; q < kErrorPoints; ++q) {
      lagrange_basis(w.rule_1d().nodes, fine.nodes[q], std::span<double>(basis.data() + q * n, n), deriv);
    }
    const QuadRuleND ref = tensor_rule(std::vector<QuadRule1D>(dim, fine));
    std::vector<double> table(ref.size() * ppc);
    for (std::size_t q = 0; q < ref.size(); ++q) {
      for (int p = 0; p < ppc; ++p) {
        double v = 1.0;
        int rq = static_cast<int>(q), rp = p;
        for (int a = dim - 1; a >= 0; --a) {
          v *= basis[(rq % kErrorPoints) * n + rp % n];
          rq /= kErrorPoints;
          rp /= n;
        }
        table[q * ppc + p] = v;
      }
    }
    for (int c = 0; c < disc.mesh->num_cells(); ++c) {
      const QuadRuleND rule = map_rule(ref, disc.mesh->cell_box(c));
      const std::size_t base = static_cast<std::size_t>(c) * ppc;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        std::array<double, 3> v{};
        for (int p = 0; p < ppc; ++p) {
          for (int a = 0; a < dim; ++a) v[a] += table[q * ppc + p] * state.alpha(base + p, a);
        }
        const double dr = v[0] - spec.exact->rho(rule.points[q]);
        e_rho += rule.weights[q] * dr * dr;
        const auto mex = spec.exact->momentum(rule.points[q]);
        for (int a = 1; a < dim; ++a) {
          const double dm = v[a] - mex[a - 1];
          e_m += rule.weights[q] * dm * dm;
        }
      }
    }
    out.l2_rho_error = std::sqrt(e_rho);
    out.l2_m_error = std::sqrt(e_m);
    out.w2_reference = reference_w2(*disc.mesh, *spec.exact, 10, density_floor);
    out.w2_error = std::abs(w2 - *out.w2_reference);
  }

  double m0 = 0.0;
  for (int i = 0; i < m.num_dofs(); ++i) m0 += m.weight(i % nk) * spec.rho0[i];
  out.initial_mass = m0;
  const QuadRule1D& rt = w.rule_1d();
  for (int j = 0; j < nt; ++j) {
    for (int it = 0; it < kt; ++it) {
      double mass = 0.0;
      for (int l = 0; l < nl; ++l) {
        const int base = disc.mesh->cell_index(j, l) * ppc + it * nk;
        for (int is = 0; is < nk; ++is) mass += m.weight(is) * state.alpha(base + is, 0);
      }
      const double t = disc.mesh->interval_start(j) + disc.mesh->dt() * rt.nodes[it];
      out.mass.push_back({t, mass});
      if (m0 != 0.0) out.max_mass_drift = std::max(out.max_mass_drift, std::abs(mass - m0) / std::abs(m0));
    }
  }

  if (spec.mode == Mode::MFG && state.rho1.size() == static_cast<std::size_t>(m.num_dofs()) &&
      state.phi_terminal.size() == state.rho1.size()) {
    double res = 0.0;
    for (std::size_t i = 0; i < state.rho1.size(); ++i) {
      const double phi1 = state.phi_terminal[i];
      const double rt_i = spec.rho_target[i];
      const double r1 = state.rho1[i];
      // l-inf distance of (rho1, -phi1) to the graph of dGamma; the vertical
      // branch at rho1 = 0 is (-inf, -rho_T]
      const double vertical = std::max(std::abs(r1), std::max(0.0, rt_i - phi1));
      const double d = r1 > 0.0 ? std::min(std::abs(phi1 + r1 - rt_i), vertical) : vertical;
      res = std::max(res, d);
    }
    out.kkt_terminal = res;
  }
  return out;
}

double TravelingWave::rho(const Point& tx) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double c = x0[a] + tx[0] * (x1[a] - x0[a]);
    const double d = tx[a + 1] - c;
    r2 += d * d;
  }
  return amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
}

std::array<double, 2> TravelingWave::momentum(const Point& tx) const {
  const double r = rho(tx);
  std::array<double, 2> out{0.0, 0.0};
  for (int a = 0; a < dim; ++a) out[a] = (x1[a] - x0[a]) * r;
  return out;
}

ExactSolution TravelingWave::exact() const {
  const TravelingWave self = *this;
  return {[self](const Point& p) { return self.rho(p); },
          [self](const Point& p) { return self.momentum(p); }};
}

BoundaryFlux TravelingWave::boundary_flux() const {
  const TravelingWave self = *this;
  return [self](const Point& p, int axis, int side) { return side * self.momentum(p)[axis]; };
}

double reference_w2(const SpaceTimeMesh& mesh, const ExactSolution& exact, int points_per_axis,
                    double density_floor) {
  const int dim = mesh.space_time_dim();
  const std::vector<QuadRule1D> axes(dim, gauss_legendre(points_per_axis));
  const QuadRuleND ref = tensor_rule(axes);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const QuadRuleND rule = map_rule(ref, mesh.cell_box(c));
    for (std::size_t p = 0; p < rule.size(); ++p) {
      const double r = std::max(exact.rho(rule.points[p]), density_floor);
      const auto mv = exact.momentum(rule.points[p]);
      double mm = 0.0;
      for (int a = 0; a + 1 < dim; ++a) mm += mv[a] * mv[a];
      sum += rule.weights[p] * mm / (2.0 * r);
    }
  }
  return sum;
}

}  // namespace wassfem
