#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wassfem/alg2.hpp"

namespace wassfem {

/// Initial, final or target density.
struct DensitySpec {
  enum class Kind { Gaussian, Image, Constant };
  Kind kind = Kind::Gaussian;
  // Gaussian: amplitude * sum_i exp(-|x - c_i|^2 / (2 sigma^2))
  std::vector<std::array<double, 2>> centers;
  double sigma = 0.1;
  double amplitude = 1.0;
  bool normalize = false;  // rescale to unit discrete mass
  // Image: PGM path, relative paths resolve against the config file
  std::string path;
  // Constant
  double value = 1.0;
};

struct ConvergenceSpec {
  std::vector<int> degrees{0};
  std::vector<int> levels{0, 1, 2, 3};
};

struct OutputSpec {
  std::string dir = "out";
  std::vector<double> snapshot_times;
  int snapshot_resolution = 64;
  bool raster = true;
};

/// Validated run configuration. See docs/config.md for the file format.
struct RunConfig {
  Mode mode = Mode::OT;
  Box domain;
  std::array<int, 2> cells{1, 1};
  int n_time = 1;
  int k = 0;
  std::vector<Box> obstacles;
  CostModel cost;
  std::optional<DensitySpec> rho0;
  std::optional<DensitySpec> rho1;
  std::optional<DensitySpec> terminal_target;
  TerminalProxDomain terminal_domain = TerminalProxDomain::Real;
  std::optional<TravelingWave> exact;
  double r1 = 1.0;
  double r2 = 1.0;
  double tol = 1e-2;
  int max_iter = 10000;
  StoppingRule stopping = StoppingRule::AlphaAndRho;
  LinearSolver linear_solver = LinearSolver::Auto;
  int direct_max_dofs = 20000;
  double cg_tol = 1e-10;
  int cg_max_iter = -1;
  ConvergenceSpec convergence;
  OutputSpec output;
  bool deterministic = false;
  std::string base_dir = ".";  // directory of the config file
};

/// Parses and validates config text. Throws ConfigError (with line info for
/// syntax errors, or the offending field for semantic ones).
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
/// Resolved config as JSON text (parse_config accepts it back).
std::string config_to_json(const RunConfig& config);

std::shared_ptr<const SpaceTimeMesh> build_mesh(const RunConfig& config);
/// Samples the densities of `config` on `disc` and fills the solver problem.
ProblemSpec build_problem(const RunConfig& config, const Discretization& disc);

struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<int> pixels;  // row-major, top row first

  int at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Reads a P2 or P5 graymap (8 or 16 bit). Throws FormatError.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image);

/// (rho, 1)_h over the spatial quadrature points.
double discrete_mass(const MSpace& m, std::span<const double> values);

/// Density values at the M points of `m`. Images are stretched over the
/// spatial domain (top row at the upper y bound), interpolated bilinearly
/// between pixel centres, floored at 1e-8 max and scaled to unit mass.
std::vector<double> load_density(const DensitySpec& spec, const MSpace& m,
                                 const std::string& base_dir = ".");

/// W field sampled on a uniform grid of cell-centred points at time t.
struct Snapshot {
  double t = 0.0;
  int dim = 1;
  std::array<int, 2> resolution{1, 1};
  std::vector<Point> points;       // spatial coordinates in slots 0..dim-1
  std::vector<bool> active;        // false inside obstacles
  std::vector<double> rho;
  std::vector<std::array<double, 2>> momentum;
};

/// Evaluates alpha at (t, x) by the tensor Lagrange interpolant through the
/// W points of the containing cell. Returns false outside the active mesh.
bool reconstruct(const Discretization& disc, const CoefficientField& alpha, const Point& tx,
                 std::array<double, 3>& value);

Snapshot sample_snapshot(const Discretization& disc, const CoefficientField& alpha, double t,
                         int resolution);
/// Writes "x[,y],rho,mx[,my]" rows for the active points. If `raster_path`
/// is non-empty also writes a P2 image of rho scaled to [0, 255].
void export_snapshot(const Discretization& disc, const CoefficientField& alpha, double t,
                     int resolution, const std::string& csv_path,
                     const std::string& raster_path = {});

void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& log,
                         bool include_timing = true);
/// Summary with the embedded config (minus the output directory); contains
/// no timings.
std::string summary_json(const RunConfig& config, const RunResult& result);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
std::string convergence_summary_json(const RunConfig& config,
                                     const std::vector<ConvergenceRow>& rows);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wassfem
