#include "wassfem/alg2.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "wassfem/errors.hpp"

namespace wassfem {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::OT: return "OT";
    case Mode::MFP: return "MFP";
    case Mode::MFG: return "MFG";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "OT" || s == "ot") return Mode::OT;
  if (s == "MFP" || s == "mfp") return Mode::MFP;
  if (s == "MFG" || s == "mfg") return Mode::MFG;
  throw ArgumentError("unknown mode '" + s + "'");
}

std::string to_string(LinearSolver s) {
  switch (s) {
    case LinearSolver::Auto: return "auto";
    case LinearSolver::CG: return "cg";
    case LinearSolver::Direct: return "direct";
  }
  return "?";
}

LinearSolver linear_solver_from_string(const std::string& s) {
  if (s == "auto") return LinearSolver::Auto;
  if (s == "cg") return LinearSolver::CG;
  if (s == "direct") return LinearSolver::Direct;
  throw ArgumentError("unknown linear solver '" + s + "'");
}

void ProblemSpec::validate(const Discretization& disc) const {
  const std::size_t nm = disc.m.num_dofs();
  if (!(r1 > 0.0)) throw ArgumentError("problem: r1 must be positive");
  if (mode == Mode::MFG && !(r2 > 0.0)) throw ArgumentError("problem: r2 must be positive");
  if (!(tol > 0.0)) throw ArgumentError("problem: tol must be positive");
  if (max_iter < 1) throw ArgumentError("problem: max_iter must be >= 1");
  cost.validate();
  if (rho0.size() != nm) throw ArgumentError("problem: rho0 does not match the M space");
  if (mode == Mode::OT && cost.kind != CostCase::Zero) {
    throw ArgumentError("problem: OT requires the zero interaction cost");
  }
  if (mode != Mode::MFG && rho1.size() != nm) {
    throw ArgumentError("problem: rho1 required for OT/MFP");
  }
  if (mode == Mode::MFG) {
    if (rho_target.size() != nm) throw ArgumentError("problem: terminal cost target required for MFG");
    for (double v : rho_target) {
      if (v < 0.0) throw ArgumentError("problem: terminal target must be nonnegative");
    }
  }
}

Alg2Solver::Alg2Solver(std::shared_ptr<const Discretization> disc, ProblemSpec spec)
    : disc_(std::move(disc)), spec_(std::move(spec)) {
  spec_.validate(*disc_);
  const SparseSymMatrix K = assemble_stiffness(disc_->v);
  if (spec_.mode == Mode::MFG) {
    system_ = linear_combination(spec_.r1, K, spec_.r2, assemble_terminal_mass(disc_->v));
  } else {
    system_ = linear_combination(spec_.r1, K, 0.0, K);
  }
  const bool direct = spec_.linear_solver == LinearSolver::Direct ||
                      (spec_.linear_solver == LinearSolver::Auto && system_.size() <= spec_.direct_max_dofs);
  if (direct) direct_ = std::make_shared<const DirectSolver>(system_, spec_.mode != Mode::MFG);
  if (spec_.boundary_flux) boundary_load_ = boundary_source_load(*disc_, spec_.boundary_flux);
}

Alg2State Alg2Solver::initial_state() const {
  const Discretization& d = *disc_;
  const int dim = d.dim();
  Alg2State s;
  s.phi.assign(d.v.num_dofs(), 0.0);
  s.alpha = CoefficientField(SpaceKind::W, d.w.num_dofs(), dim);
  s.alpha_star = CoefficientField(SpaceKind::W, d.w.num_dofs(), dim);
  const int ppc = d.w.points_per_cell();
  const int nk = d.w.spatial_points_per_cell();
  const int nl = d.mesh->spatial().num_active();
  for (int dof = 0; dof < d.w.num_dofs(); ++dof) {
    const int cell = dof / ppc;
    const int p = dof % ppc;
    const int l = cell % nl;
    const int mdof = l * nk + p % nk;
    const double t = d.w.point(dof)[0];
    if (spec_.mode == Mode::MFG) {
      s.alpha(dof, 0) = spec_.rho0[mdof];
    } else {
      s.alpha(dof, 0) = (1.0 - t) * spec_.rho0[mdof] + t * spec_.rho1[mdof];
    }
  }
  if (spec_.mode == Mode::MFG) {
    s.rho1 = spec_.rho0;
    s.rho1_star.assign(d.m.num_dofs(), 0.0);
  }
  refresh_samples(s);
  return s;
}

void Alg2Solver::refresh_samples(Alg2State& state) const {
  state.grad_phi = gradient_samples(*disc_, state.phi);
  if (spec_.mode == Mode::MFG) state.phi_terminal = disc_->trace1.apply(state.phi);
}

int Alg2Solver::step_A(Alg2State& state) const {
  StepARhsInputs in;
  in.alpha = &state.alpha;
  in.alpha_star = &state.alpha_star;
  in.rho0 = spec_.rho0;
  in.r1 = spec_.r1;
  if (spec_.mode == Mode::MFG) {
    in.rho1 = state.rho1;
    in.rho1_star = state.rho1_star;
    in.r2 = spec_.r2;
  } else {
    in.rho1 = spec_.rho1;
    in.r2 = 0.0;
  }
  in.boundary_load = boundary_load_;
  const std::vector<double> b = assemble_stepA_rhs(*disc_, in);
  if (direct_) {
    state.phi = direct_->solve(b);
    refresh_samples(state);
    return 0;
  }
  CgOptions opts = spec_.cg;
  opts.deflate_constants = spec_.mode != Mode::MFG;
  CgResult res = cg_solve(system_, b, opts, state.phi);
  state.phi = std::move(res.x);
  refresh_samples(state);
  return res.iterations;
}

void Alg2Solver::step_B(Alg2State& state) const {
  const Discretization& d = *disc_;
  const int dim = d.dim();
  const int n = d.w.num_dofs();
  const double r1 = spec_.r1;
  std::vector<int> failed;
  std::string first_error;
#ifdef WASSFEM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int dof = 0; dof < n; ++dof) {
    std::array<double, 3> b{};
    for (int a = 0; a < dim; ++a) b[a] = state.alpha(dof, a) + r1 * state.grad_phi(dof, a);
    const double hint = state.alpha(dof, 0);
    try {
      const ProxAlphaResult res = prox_alpha(spec_.cost, std::span<const double>(b.data(), dim), r1,
                                             hint > 0.0 ? std::optional<double>(hint) : std::nullopt);
      for (int a = 0; a < dim; ++a) state.alpha_star(dof, a) = res.a[a];
    } catch (const ProxError& e) {
#ifdef WASSFEM_HAVE_OPENMP
#pragma omp critical
#endif
      {
        failed.push_back(dof);
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    std::ostringstream os;
    os << "step B: prox failed at " << failed.size() << " point(s); first at (";
    const Point p = d.w.point(failed.front());
    for (int a = 0; a < dim; ++a) os << (a ? ", " : "") << p[a];
    os << "): " << first_error;
    throw ProxError(os.str());
  }
  if (spec_.mode == Mode::MFG) {
    const int nm = d.m.num_dofs();
    for (int i = 0; i < nm; ++i) {
      const double b = state.rho1[i] - spec_.r2 * state.phi_terminal[i];
      state.rho1_star[i] = prox_rho1(spec_.rho_target[i], b, spec_.r2, spec_.terminal_domain);
    }
  }
}

void Alg2Solver::step_C(Alg2State& state) const {
  const double r1 = spec_.r1;
  double err_a = 0.0;
  const std::size_t n = state.alpha.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = r1 * (state.grad_phi.values[i] - state.alpha_star.values[i]);
    state.alpha.values[i] += delta;
    err_a = std::max(err_a, std::abs(delta));
  }
  double err_r = 0.0;
  if (spec_.mode == Mode::MFG) {
    for (std::size_t i = 0; i < state.rho1.size(); ++i) {
      const double delta = -spec_.r2 * (state.phi_terminal[i] + state.rho1_star[i]);
      state.rho1[i] += delta;
      err_r = std::max(err_r, std::abs(delta));
    }
  }
  state.err_a = err_a;
  state.err_r = err_r;
}

IterationRecord Alg2Solver::iterate(Alg2State& state) const {
  const auto start = std::chrono::steady_clock::now();
  IterationRecord rec;
  rec.cg_iterations = step_A(state);
  step_B(state);
  step_C(state);
  ++state.iteration;
  rec.iteration = state.iteration;
  rec.err_a = state.err_a;
  rec.err_r = state.err_r;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

bool Alg2Solver::stop(const Alg2State& state) const {
  if (state.iteration == 0) return false;
  double err = state.err_a;
  if (spec_.mode == Mode::MFG && spec_.stopping == StoppingRule::AlphaAndRho) {
    err = std::max(err, state.err_r);
  }
  return err < spec_.tol;
}

RunResult Alg2Solver::run(const Observer& observer) const {
  RunResult out;
  out.state = initial_state();
  while (out.state.iteration < spec_.max_iter) {
    const IterationRecord rec = iterate(out.state);
    out.log.push_back(rec);
    if (observer) observer(rec);
    if (stop(out.state)) {
      out.converged = true;
      break;
    }
  }
  out.metrics = metrics(*disc_, spec_, out.state);
  return out;
}

RunResult run(const ProblemSpec& spec, std::shared_ptr<const SpaceTimeMesh> mesh, int k,
              const Alg2Solver::Observer& observer) {
  auto disc = std::make_shared<const Discretization>(std::move(mesh), k);
  const Alg2Solver solver(disc, spec);
  return solver.run(observer);
}

std::vector<ConvergenceRow> convergence_study(const Box& domain, const ProblemBuilder& builder,
                                              const std::vector<int>& degrees,
                                              const std::vector<int>& levels,
                                              const Alg2Solver::Observer& observer) {
  std::vector<ConvergenceRow> rows;
  for (int k : degrees) {
    const ConvergenceRow* prev = nullptr;
    std::size_t first_of_degree = rows.size();
    for (int s : levels) {
      ConvergenceRow row;
      row.k = k;
      row.level = s;
      try {
        const int per_dir = 1 << (s + 2);
        if (per_dir % (k + 1) != 0) {
          throw ArgumentError("convergence_study: k+1 must divide 2^(s+2)");
        }
        row.cells = per_dir / (k + 1);
        std::array<int, 2> cells{row.cells, row.cells};
        auto mesh = std::make_shared<const SpaceTimeMesh>(
            build_spatial_mesh(domain, cells), row.cells);
        auto disc = std::make_shared<const Discretization>(mesh, k);
        const Alg2Solver solver(disc, builder(*disc));
        const RunResult res = solver.run(observer);
        row.iterations = res.state.iteration;
        row.converged = res.converged;
        row.l2_rho = res.metrics.l2_rho_error;
        row.l2_m = res.metrics.l2_m_error;
        row.w2_error = res.metrics.w2_error;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(row);
      if (rows.size() > first_of_degree + 1) prev = &rows[rows.size() - 2];
      if (prev && prev->level + 1 == row.level) {
        ConvergenceRow& cur = rows.back();
        auto order = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<double> {
          if (!a || !b || !(*a > 0.0) || !(*b > 0.0)) return std::nullopt;
          return std::log2(*a / *b);
        };
        cur.order_rho = order(prev->l2_rho, cur.l2_rho);
        cur.order_m = order(prev->l2_m, cur.l2_m);
        cur.order_w2 = order(prev->w2_error, cur.w2_error);
      }
    }
  }
  return rows;
}

}  // namespace wassfem
