#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "wassfem/errors.hpp"
#include "wassfem/io.hpp"
#include "wassfem/version.hpp"

namespace wassfem {
namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

int do_solve(RunConfig config) {
  const std::filesystem::path out(config.output.dir);
  std::filesystem::create_directories(out);
  auto mesh = build_mesh(config);
  auto disc = std::make_shared<const Discretization>(mesh, config.k);
  const Alg2Solver solver(disc, build_problem(config, *disc));
  const RunResult res = solver.run();

  write_iteration_log((out / "iterations.csv").string(), res.log, !config.deterministic);
  for (double t : config.output.snapshot_times) {
    const std::string stem = "snapshot_t" + time_tag(t);
    export_snapshot(*disc, res.state.alpha, t, config.output.snapshot_resolution,
                    (out / (stem + ".csv")).string(),
                    config.output.raster ? (out / (stem + ".pgm")).string() : std::string());
  }
  write_text_file((out / "summary.json").string(), summary_json(config, res));

  std::cout << to_string(config.mode) << " " << (res.converged ? "converged" : "did not converge")
            << " after " << res.state.iteration << " iterations (err_a " << res.state.err_a;
  if (config.mode == Mode::MFG) std::cout << ", err_r " << res.state.err_r;
  std::cout << "), W2^2 = " << res.metrics.w2 << "\n";
  if (res.metrics.l2_rho_error) std::cout << "L2(rho) error = " << *res.metrics.l2_rho_error << "\n";
  if (!res.converged) {
    std::cerr << "wassfem: iteration limit reached\n";
    return kNumerical;
  }
  return kOk;
}

int do_convergence(const RunConfig& config) {
  if (!config.exact) {
    std::cerr << "wassfem: convergence requires an 'exact' solution in the config\n";
    return kUsage;
  }
  const std::filesystem::path out(config.output.dir);
  std::filesystem::create_directories(out);
  const auto builder = [&config](const Discretization& d) { return build_problem(config, d); };
  const std::vector<ConvergenceRow> rows =
      convergence_study(config.domain, builder, config.convergence.degrees, config.convergence.levels);
  const std::string csv = convergence_csv(rows);
  write_text_file((out / "convergence.csv").string(), csv);
  write_text_file((out / "summary.json").string(), convergence_summary_json(config, rows));
  std::cout << csv;
  bool ok = true;
  for (const ConvergenceRow& r : rows) {
    if (!r.error.empty()) std::cerr << "wassfem: k=" << r.k << " s=" << r.level << ": " << r.error << "\n";
    ok = ok && r.error.empty() && r.converged;
  }
  return ok ? kOk : kNumerical;
}

int do_info() {
  std::cout << "wassfem " << version << "\n"
            << "build type: " << build_type << "\n"
            << "openmp: " << (with_openmp ? "on" : "off") << "\n";
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Space-time finite elements for optimal transport and mean-field problems", "wassfem"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  bool deterministic = false;
  const auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (need_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--deterministic", deterministic, "reproducible outputs (no timings)");
  };
  CLI::App* solve = app.add_subcommand("solve", "run ALG2 on one configuration");
  CLI::App* conv = app.add_subcommand("convergence", "mesh-refinement study against the exact solution");
  CLI::App* info = app.add_subcommand("info", "print version and build options");
  add_common(solve, true);
  add_common(conv, true);
  add_common(info, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  if (info->parsed()) return do_info();

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "wassfem: " << e.what() << "\n";
    return kUsage;
  }
  if (!out_dir.empty()) config.output.dir = out_dir;
  if (deterministic) config.deterministic = true;

  try {
    return solve->parsed() ? do_solve(config) : do_convergence(config);
  } catch (const SolverError& e) {
    std::cerr << "wassfem: linear solver failed: " << e.what() << "\n";
    return kNumerical;
  } catch (const ProxError& e) {
    std::cerr << "wassfem: " << e.what() << "\n";
    return kNumerical;
  } catch (const ArgumentError& e) {
    std::cerr << "wassfem: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "wassfem: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "wassfem: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace wassfem
