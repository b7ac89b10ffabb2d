#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wassfem/assembly.hpp"
#include "wassfem/costs.hpp"
#include "wassfem/solver.hpp"

namespace wassfem {

enum class Mode { OT, MFP, MFG };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Step-A linear solver. Auto factors the system once when it has at most
/// ProblemSpec::direct_max_dofs unknowns and uses warm-started CG otherwise.
enum class LinearSolver { Auto, CG, Direct };

std::string to_string(LinearSolver s);
LinearSolver linear_solver_from_string(const std::string& s);

enum class StoppingRule {
  Alpha,        // err_a < tol
  AlphaAndRho,  // max(err_a, err_r) < tol (MFG only; same as Alpha otherwise)
};

/// Exact density and momentum as functions of (t, x[, y]).
struct ExactSolution {
  std::function<double(const Point&)> rho;
  std::function<std::array<double, 2>(const Point&)> momentum;
};

/// Problem data, sampled on the spatial quadrature points of the
/// discretization it is solved on.
struct ProblemSpec {
  Mode mode = Mode::OT;
  CostModel cost;
  std::vector<double> rho0;        // M points
  std::vector<double> rho1;        // M points, OT/MFP
  std::vector<double> rho_target;  // M points, MFG terminal cost
  TerminalProxDomain terminal_domain = TerminalProxDomain::Real;
  BoundaryFlux boundary_flux;      // optional lateral source m . n
  std::optional<ExactSolution> exact;
  double r1 = 1.0;  // r for OT/MFP
  double r2 = 1.0;  // MFG only
  double tol = 1e-2;
  int max_iter = 10000;
  StoppingRule stopping = StoppingRule::AlphaAndRho;
  LinearSolver linear_solver = LinearSolver::Auto;
  int direct_max_dofs = 20000;
  CgOptions cg;

  void validate(const Discretization& disc) const;
};

/// ALG2 iterate. alpha = (rho, m) doubles as the primal solution.
struct Alg2State {
  std::vector<double> phi;          // V
  CoefficientField alpha;           // W, dim components
  CoefficientField alpha_star;      // W, dim components
  std::vector<double> rho1;         // M (MFG)
  std::vector<double> rho1_star;    // M (MFG)
  int iteration = 0;
  double err_a = 0.0;
  double err_r = 0.0;
  // samples of the current phi used by Steps B and C
  CoefficientField grad_phi;
  std::vector<double> phi_terminal;
};

struct IterationRecord {
  int iteration = 0;
  double err_a = 0.0;
  double err_r = 0.0;
  int cg_iterations = 0;
  double seconds = 0.0;
};

struct MassSample {
  double t = 0.0;
  double mass = 0.0;
};

struct Metrics {
  // L2(space-time) norms of the piecewise tensor polynomials through the
  // W points against the exact fields, 10-point Gauss per axis and cell
  std::optional<double> l2_rho_error;
  std::optional<double> l2_m_error;
  double w2 = 0.0;
  std::optional<double> w2_reference;
  std::optional<double> w2_error;
  double initial_mass = 0.0;
  std::vector<MassSample> mass;
  double max_mass_drift = 0.0;
  double kkt_velocity = 0.0;
  std::optional<double> kkt_terminal;
};

struct RunResult {
  Alg2State state;
  std::vector<IterationRecord> log;
  bool converged = false;
  Metrics metrics;
};

/// Runs ALG2 on a fixed discretization.
class Alg2Solver {
 public:
  Alg2Solver(std::shared_ptr<const Discretization> disc, ProblemSpec spec);

  const Discretization& discretization() const { return *disc_; }
  const ProblemSpec& spec() const { return spec_; }
  const SparseSymMatrix& system_matrix() const { return system_; }
  bool uses_direct_solver() const { return direct_ != nullptr; }

  Alg2State initial_state() const;

  /// Solves the elliptic phi problem; refreshes the phi samples in `state`.
  /// Returns the CG iteration count (0 for the direct solver).
  int step_A(Alg2State& state) const;
  /// Pointwise proximal updates of alpha* and rho1*.
  void step_B(Alg2State& state) const;
  /// Multiplier ascent; sets err_a and err_r.
  void step_C(Alg2State& state) const;
  IterationRecord iterate(Alg2State& state) const;
  bool stop(const Alg2State& state) const;

  using Observer = std::function<void(const IterationRecord&)>;
  RunResult run(const Observer& observer = {}) const;

  /// Recomputes grad phi at W points and phi(1, .) at M points.
  void refresh_samples(Alg2State& state) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  ProblemSpec spec_;
  SparseSymMatrix system_;
  std::shared_ptr<const DirectSolver> direct_;
  std::vector<double> boundary_load_;
};

RunResult run(const ProblemSpec& spec, std::shared_ptr<const SpaceTimeMesh> mesh, int k,
              const Alg2Solver::Observer& observer = {});

/// Post-processing of a (possibly partial) state.
Metrics metrics(const Discretization& disc, const ProblemSpec& spec, const Alg2State& state,
                double density_floor = 1e-12);

/// Translating Gaussian: rho = amp exp(-|x - c(t)|^2 / (2 sigma^2)),
/// c(t) = x0 + t (x1 - x0), m = (x1 - x0) rho.
struct TravelingWave {
  int dim = 1;
  std::array<double, 2> x0{0.25, 0.25};
  std::array<double, 2> x1{0.75, 0.75};
  double sigma = 0.1;
  double amplitude = 1.0;

  double rho(const Point& tx) const;
  std::array<double, 2> momentum(const Point& tx) const;
  ExactSolution exact() const;
  /// m_ex . n on the lateral boundary (point in space-time coordinates).
  BoundaryFlux boundary_flux() const;
};

/// Reference value of the integral of |m|^2/(2 rho) for exact fields, by
/// an n-point Gauss rule per axis on every cell of the mesh.
double reference_w2(const SpaceTimeMesh& mesh, const ExactSolution& exact, int points_per_axis = 10,
                    double density_floor = 1e-12);

struct ConvergenceRow {
  int k = 0;
  int level = 0;
  int cells = 0;
  std::optional<double> l2_rho;
  std::optional<double> l2_m;
  std::optional<double> w2_error;
  std::optional<double> order_rho;
  std::optional<double> order_m;
  std::optional<double> order_w2;
  int iterations = 0;
  bool converged = false;
  std::string error;
};

/// Builds the problem for a discretization (densities sampled on its M points).
using ProblemBuilder = std::function<ProblemSpec(const Discretization&)>;

/// Mesh family with 2^{s+2}/(k+1) cells per space-time direction on the
/// spatial box `domain`, so all degrees share DOF counts at each level.
/// Orders are log2 of successive error ratios. A failing run is recorded in
/// its row and the study continues.
std::vector<ConvergenceRow> convergence_study(const Box& domain, const ProblemBuilder& builder,
                                              const std::vector<int>& degrees,
                                              const std::vector<int>& levels,
                                              const Alg2Solver::Observer& observer = {});

}  // namespace wassfem
