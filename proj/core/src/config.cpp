#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wassfem/errors.hpp"
#include "wassfem/io.hpp"

namespace wassfem {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError(field + ": " + msg);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where.empty() ? "config" : where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

std::string join(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(where, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(join(where, key), "must be finite");
  return d;
}

int get_int(const json& obj, const std::string& where, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(where, key), "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(where, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(where, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) fail(field, "expected an array of numbers");
    out.push_back(x.get<double>());
    if (!std::isfinite(out.back())) fail(field, "must be finite");
  }
  return out;
}

std::array<double, 2> get_point(const json& v, const std::string& field, int dim) {
  const std::vector<double> x = get_vector(v, field);
  if (static_cast<int>(x.size()) != dim) fail(field, "expected " + std::to_string(dim) + " coordinates");
  std::array<double, 2> p{0.0, 0.0};
  for (int a = 0; a < dim; ++a) p[a] = x[a];
  return p;
}

Box parse_box(const json& obj, const std::string& where, int dim) {
  check_keys(obj, where, {"lower", "upper"});
  if (!obj.contains("lower") || !obj.contains("upper")) fail(where, "lower and upper required");
  const std::vector<double> lo = get_vector(obj.at("lower"), where + ".lower");
  const std::vector<double> hi = get_vector(obj.at("upper"), where + ".upper");
  if (dim == 0) dim = static_cast<int>(lo.size());
  if (dim < 1 || dim > 2) fail(where, "only 1D and 2D domains are supported");
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim) {
    fail(where, "expected " + std::to_string(dim) + " coordinates");
  }
  Box b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a])) fail(where, "upper must exceed lower");
    b.lower[a] = lo[a];
    b.upper[a] = hi[a];
  }
  return b;
}

DensitySpec parse_density(const json& obj, const std::string& where, int dim) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::string type = get_string(obj, where, "type", "");
  DensitySpec d;
  if (type == "gaussian") {
    check_keys(obj, where, {"type", "center", "centers", "sigma", "amplitude", "normalize"});
    d.kind = DensitySpec::Kind::Gaussian;
    if (obj.contains("center") == obj.contains("centers")) fail(where, "give exactly one of center, centers");
    if (obj.contains("center")) {
      d.centers.push_back(get_point(obj.at("center"), where + ".center", dim));
    } else {
      const json& cs = obj.at("centers");
      if (!cs.is_array() || cs.empty()) fail(where + ".centers", "expected a nonempty array");
      for (const json& c : cs) d.centers.push_back(get_point(c, where + ".centers", dim));
    }
    d.sigma = get_number(obj, where, "sigma", 0.1);
    if (!(d.sigma > 0.0)) fail(where + ".sigma", "must be positive");
    d.amplitude = get_number(obj, where, "amplitude", 1.0);
    if (!(d.amplitude > 0.0)) fail(where + ".amplitude", "must be positive");
    d.normalize = get_bool(obj, where, "normalize", false);
  } else if (type == "image") {
    check_keys(obj, where, {"type", "path"});
    d.kind = DensitySpec::Kind::Image;
    d.path = get_string(obj, where, "path", "");
    if (d.path.empty()) fail(where + ".path", "required");
    d.normalize = true;
  } else if (type == "constant") {
    check_keys(obj, where, {"type", "value", "normalize"});
    d.kind = DensitySpec::Kind::Constant;
    d.value = get_number(obj, where, "value", 1.0);
    if (!(d.value >= 0.0)) fail(where + ".value", "must be nonnegative");
    d.normalize = get_bool(obj, where, "normalize", false);
  } else {
    fail(where + ".type", "expected gaussian, image or constant");
  }
  return d;
}

json density_to_json(const DensitySpec& d, int dim) {
  json j;
  switch (d.kind) {
    case DensitySpec::Kind::Gaussian: {
      j["type"] = "gaussian";
      json cs = json::array();
      for (const auto& c : d.centers) cs.push_back(std::vector<double>(c.begin(), c.begin() + dim));
      j["centers"] = cs;
      j["sigma"] = d.sigma;
      j["amplitude"] = d.amplitude;
      j["normalize"] = d.normalize;
      break;
    }
    case DensitySpec::Kind::Image:
      j["type"] = "image";
      j["path"] = d.path;
      break;
    case DensitySpec::Kind::Constant:
      j["type"] = "constant";
      j["value"] = d.value;
      j["normalize"] = d.normalize;
      break;
  }
  return j;
}

json box_to_json(const Box& b) {
  return {{"lower", std::vector<double>(b.lower.begin(), b.lower.begin() + b.dim)},
          {"upper", std::vector<double>(b.upper.begin(), b.upper.begin() + b.dim)}};
}

std::vector<int> get_int_list(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(field, "expected a nonempty array of integers");
  std::vector<int> out;
  for (const json& x : v) {
    if (!x.is_number_integer()) fail(field, "expected a nonempty array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  // a run summary embeds its resolved config; accept it directly
  if (root.is_object() && root.contains("config") && root.contains("converged")) {
    json inner = root.at("config");
    root = std::move(inner);
  }
  check_keys(root, "",
             {"mode", "domain", "cells", "n_time", "k", "obstacles", "cost", "rho0", "rho1",
              "terminal_cost", "exact", "r1", "r2", "tol", "max_iter", "stopping", "linear_solver",
              "convergence", "output", "deterministic"});

  RunConfig c;
  c.base_dir = base_dir;
  if (!root.contains("mode")) fail("mode", "required");
  try {
    c.mode = mode_from_string(get_string(root, "", "mode", ""));
  } catch (const ArgumentError&) {
    fail("mode", "expected OT, MFP or MFG");
  }
  if (!root.contains("domain")) fail("domain", "required");
  c.domain = parse_box(root.at("domain"), "domain", 0);
  const int dim = c.domain.dim;

  if (root.contains("cells")) {
    const std::vector<int> cells = get_int_list(root.at("cells"), "cells");
    if (static_cast<int>(cells.size()) != dim) fail("cells", "expected one count per spatial axis");
    for (int a = 0; a < dim; ++a) {
      if (cells[a] < 1) fail("cells", "counts must be positive");
      c.cells[a] = cells[a];
    }
  } else {
    c.cells = {8, dim == 2 ? 8 : 1};
  }
  c.n_time = get_int(root, "", "n_time", c.cells[0]);
  if (c.n_time < 1) fail("n_time", "must be positive");
  c.k = get_int(root, "", "k", 0);
  if (c.k < 0 || c.k > 7) fail("k", "must be in [0, 7]");

  if (root.contains("obstacles")) {
    const json& obs = root.at("obstacles");
    if (!obs.is_array()) fail("obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      c.obstacles.push_back(parse_box(obs[i], "obstacles[" + std::to_string(i) + "]", dim));
    }
  }

  if (root.contains("cost")) {
    const json& cj = root.at("cost");
    check_keys(cj, "cost", {"case", "c", "rho_max"});
    if (!cj.contains("case")) fail("cost.case", "required");
    const json& cs = cj.at("case");
    try {
      c.cost.kind = cost_case_from_string(cs.is_number_integer() ? std::to_string(cs.get<int>())
                                          : cs.is_string()       ? cs.get<std::string>()
                                                                 : std::string("?"));
    } catch (const ArgumentError&) {
      fail("cost.case", "expected zero, quadratic, entropy, inverse_density, box or 1-5");
    }
    c.cost.c = get_number(cj, "cost", "c", c.cost.c);
    c.cost.rho_max = get_number(cj, "cost", "rho_max", c.cost.rho_max);
    try {
      c.cost.validate();
    } catch (const ArgumentError& e) {
      fail("cost", e.what());
    }
  } else if (c.mode != Mode::OT) {
    fail("cost", "required for MFP and MFG");
  } else {
    c.cost.kind = CostCase::Zero;
  }
  if (c.mode == Mode::OT && c.cost.kind != CostCase::Zero) fail("cost.case", "OT requires the zero cost");

  if (root.contains("exact")) {
    const json& ej = root.at("exact");
    check_keys(ej, "exact", {"type", "x0", "x1", "sigma", "amplitude"});
    if (get_string(ej, "exact", "type", "traveling_wave") != "traveling_wave") {
      fail("exact.type", "only traveling_wave is supported");
    }
    TravelingWave w;
    w.dim = dim;
    if (ej.contains("x0")) w.x0 = get_point(ej.at("x0"), "exact.x0", dim);
    if (ej.contains("x1")) w.x1 = get_point(ej.at("x1"), "exact.x1", dim);
    w.sigma = get_number(ej, "exact", "sigma", w.sigma);
    if (!(w.sigma > 0.0)) fail("exact.sigma", "must be positive");
    w.amplitude = get_number(ej, "exact", "amplitude", w.amplitude);
    if (c.mode != Mode::OT) fail("exact", "only available for OT");
    c.exact = w;
  }

  if (root.contains("rho0")) c.rho0 = parse_density(root.at("rho0"), "rho0", dim);
  if (root.contains("rho1")) c.rho1 = parse_density(root.at("rho1"), "rho1", dim);
  if (!c.rho0 && !c.exact) fail("rho0", "required");
  if (c.mode != Mode::MFG && !c.rho1 && !c.exact) fail("rho1", "required for OT and MFP");
  if (c.mode == Mode::MFG && c.rho1) fail("rho1", "not used by MFG (the terminal density is free)");

  if (root.contains("terminal_cost")) {
    if (c.mode != Mode::MFG) fail("terminal_cost", "only used by MFG");
    const json& tj = root.at("terminal_cost");
    check_keys(tj, "terminal_cost", {"target", "prox_domain"});
    if (!tj.contains("target")) fail("terminal_cost.target", "required");
    c.terminal_target = parse_density(tj.at("target"), "terminal_cost.target", dim);
    const std::string dom = get_string(tj, "terminal_cost", "prox_domain", "real");
    if (dom == "real") {
      c.terminal_domain = TerminalProxDomain::Real;
    } else if (dom == "nonnegative") {
      c.terminal_domain = TerminalProxDomain::Nonnegative;
    } else {
      fail("terminal_cost.prox_domain", "expected real or nonnegative");
    }
  } else if (c.mode == Mode::MFG) {
    fail("terminal_cost", "terminal_cost required");
  }

  c.r1 = get_number(root, "", "r1", 1.0);
  c.r2 = get_number(root, "", "r2", 1.0);
  if (!(c.r1 > 0.0)) fail("r1", "must be positive");
  if (!(c.r2 > 0.0)) fail("r2", "must be positive");
  c.tol = get_number(root, "", "tol", 1e-2);
  if (!(c.tol > 0.0)) fail("tol", "must be positive");
  c.max_iter = get_int(root, "", "max_iter", 10000);
  if (c.max_iter < 1) fail("max_iter", "must be positive");
  const std::string stop = get_string(root, "", "stopping", "alpha_and_rho");
  if (stop == "alpha") {
    c.stopping = StoppingRule::Alpha;
  } else if (stop == "alpha_and_rho") {
    c.stopping = StoppingRule::AlphaAndRho;
  } else {
    fail("stopping", "expected alpha or alpha_and_rho");
  }

  if (root.contains("linear_solver")) {
    const json& gj = root.at("linear_solver");
    const std::string w = "linear_solver";
    check_keys(gj, w, {"method", "cg_tol", "cg_max_iter", "direct_max_dofs"});
    try {
      c.linear_solver = linear_solver_from_string(get_string(gj, w, "method", "auto"));
    } catch (const ArgumentError&) {
      fail("linear_solver.method", "expected auto, cg or direct");
    }
    c.cg_tol = get_number(gj, w, "cg_tol", c.cg_tol);
    if (!(c.cg_tol > 0.0)) fail("linear_solver.cg_tol", "must be positive");
    c.cg_max_iter = get_int(gj, w, "cg_max_iter", c.cg_max_iter);
    c.direct_max_dofs = get_int(gj, w, "direct_max_dofs", c.direct_max_dofs);
  }

  if (root.contains("convergence")) {
    const json& vj = root.at("convergence");
    check_keys(vj, "convergence", {"degrees", "levels"});
    if (vj.contains("degrees")) c.convergence.degrees = get_int_list(vj.at("degrees"), "convergence.degrees");
    if (vj.contains("levels")) c.convergence.levels = get_int_list(vj.at("levels"), "convergence.levels");
    for (int k : c.convergence.degrees) {
      if (k < 0 || k > 7) fail("convergence.degrees", "must be in [0, 7]");
    }
    for (int s : c.convergence.levels) {
      if (s < 0 || s > 8) fail("convergence.levels", "must be in [0, 8]");
    }
  }

  if (root.contains("output")) {
    const json& oj = root.at("output");
    check_keys(oj, "output", {"dir", "snapshot_times", "snapshot_resolution", "raster"});
    c.output.dir = get_string(oj, "output", "dir", c.output.dir);
    if (oj.contains("snapshot_times")) {
      c.output.snapshot_times = get_vector(oj.at("snapshot_times"), "output.snapshot_times");
      for (double t : c.output.snapshot_times) {
        if (t < 0.0 || t > 1.0) fail("output.snapshot_times", "times must lie in [0, 1]");
      }
    }
    c.output.snapshot_resolution = get_int(oj, "output", "snapshot_resolution", c.output.snapshot_resolution);
    if (c.output.snapshot_resolution < 1) fail("output.snapshot_resolution", "must be positive");
    c.output.raster = get_bool(oj, "output", "raster", c.output.raster);
  }
  c.deterministic = get_bool(root, "", "deterministic", false);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path p(path);
  const std::string base = p.has_parent_path() ? p.parent_path().string() : std::string(".");
  try {
    return parse_config(ss.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace {

json config_json(const RunConfig& c) {
  const int dim = c.domain.dim;
  json j;
  j["mode"] = to_string(c.mode);
  j["domain"] = box_to_json(c.domain);
  j["cells"] = std::vector<int>(c.cells.begin(), c.cells.begin() + dim);
  j["n_time"] = c.n_time;
  j["k"] = c.k;
  json obs = json::array();
  for (const Box& b : c.obstacles) obs.push_back(box_to_json(b));
  j["obstacles"] = obs;
  j["cost"] = {{"case", to_string(c.cost.kind)}, {"c", c.cost.c}, {"rho_max", c.cost.rho_max}};
  if (c.rho0) j["rho0"] = density_to_json(*c.rho0, dim);
  if (c.rho1) j["rho1"] = density_to_json(*c.rho1, dim);
  if (c.terminal_target) {
    j["terminal_cost"] = {
        {"target", density_to_json(*c.terminal_target, dim)},
        {"prox_domain", c.terminal_domain == TerminalProxDomain::Real ? "real" : "nonnegative"}};
  }
  if (c.exact) {
    j["exact"] = {{"type", "traveling_wave"},
                  {"x0", std::vector<double>(c.exact->x0.begin(), c.exact->x0.begin() + dim)},
                  {"x1", std::vector<double>(c.exact->x1.begin(), c.exact->x1.begin() + dim)},
                  {"sigma", c.exact->sigma},
                  {"amplitude", c.exact->amplitude}};
  }
  j["r1"] = c.r1;
  j["r2"] = c.r2;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["stopping"] = c.stopping == StoppingRule::Alpha ? "alpha" : "alpha_and_rho";
  j["linear_solver"] = {{"method", to_string(c.linear_solver)},
                        {"cg_tol", c.cg_tol},
                        {"cg_max_iter", c.cg_max_iter},
                        {"direct_max_dofs", c.direct_max_dofs}};
  j["convergence"] = {{"degrees", c.convergence.degrees}, {"levels", c.convergence.levels}};
  j["output"] = {{"dir", c.output.dir},
                 {"snapshot_times", c.output.snapshot_times},
                 {"snapshot_resolution", c.output.snapshot_resolution},
                 {"raster", c.output.raster}};
  j["deterministic"] = c.deterministic;
  return j;
}

}  // namespace

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

std::shared_ptr<const SpaceTimeMesh> build_mesh(const RunConfig& config) {
  return std::make_shared<const SpaceTimeMesh>(
      build_spatial_mesh(config.domain, config.cells, config.obstacles), config.n_time);
}

ProblemSpec build_problem(const RunConfig& c, const Discretization& disc) {
  ProblemSpec p;
  p.mode = c.mode;
  p.cost = c.cost;
  const auto slice = [&](double t) {
    const TravelingWave w = *c.exact;
    return sample_m(disc.m, [&](const Point& x) { return w.rho({t, x[0], x[1]}); });
  };
  p.rho0 = c.rho0 ? load_density(*c.rho0, disc.m, c.base_dir) : slice(0.0);
  if (c.mode != Mode::MFG) p.rho1 = c.rho1 ? load_density(*c.rho1, disc.m, c.base_dir) : slice(1.0);
  if (c.mode == Mode::MFG) p.rho_target = load_density(*c.terminal_target, disc.m, c.base_dir);
  p.terminal_domain = c.terminal_domain;
  if (c.exact) {
    p.exact = c.exact->exact();
    p.boundary_flux = c.exact->boundary_flux();
  }
  p.r1 = c.r1;
  p.r2 = c.r2;
  p.tol = c.tol;
  p.max_iter = c.max_iter;
  p.stopping = c.stopping;
  p.linear_solver = c.linear_solver;
  p.direct_max_dofs = c.direct_max_dofs;
  p.cg.tol = c.cg_tol;
  p.cg.max_iter = c.cg_max_iter;
  return p;
}

namespace {

// The output location does not affect results, so summaries leave it out.
json summary_config(const RunConfig& config) {
  json j = config_json(config);
  j["output"].erase("dir");
  return j;
}

}  // namespace

std::string summary_json(const RunConfig& config, const RunResult& r) {
  json j;
  j["config"] = summary_config(config);
  j["converged"] = r.converged;
  j["iterations"] = r.state.iteration;
  j["err_a"] = r.state.err_a;
  j["err_r"] = r.state.err_r;
  const Metrics& m = r.metrics;
  json mj;
  mj["l2_rho_error"] = m.l2_rho_error ? json(*m.l2_rho_error) : json(nullptr);
  mj["l2_m_error"] = m.l2_m_error ? json(*m.l2_m_error) : json(nullptr);
  mj["w2"] = m.w2;
  mj["w2_reference"] = m.w2_reference ? json(*m.w2_reference) : json(nullptr);
  mj["w2_error"] = m.w2_error ? json(*m.w2_error) : json(nullptr);
  mj["initial_mass"] = m.initial_mass;
  json masses = json::array();
  for (const MassSample& s : m.mass) masses.push_back({{"t", s.t}, {"mass", s.mass}});
  mj["mass"] = masses;
  mj["max_mass_drift"] = m.max_mass_drift;
  mj["kkt_velocity"] = m.kkt_velocity;
  mj["kkt_terminal"] = m.kkt_terminal ? json(*m.kkt_terminal) : json(nullptr);
  j["metrics"] = mj;
  return j.dump(2) + "\n";
}

std::string convergence_summary_json(const RunConfig& config, const std::vector<ConvergenceRow>& rows) {
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["config"] = summary_config(config);
  json rj = json::array();
  for (const ConvergenceRow& r : rows) {
    rj.push_back({{"k", r.k},
                  {"level", r.level},
                  {"cells", r.cells},
                  {"l2_rho", opt(r.l2_rho)},
                  {"order_rho", opt(r.order_rho)},
                  {"l2_m", opt(r.l2_m)},
                  {"order_m", opt(r.order_m)},
                  {"w2_error", opt(r.w2_error)},
                  {"order_w2", opt(r.order_w2)},
                  {"iterations", r.iterations},
                  {"converged", r.converged},
                  {"error", r.error}});
  }
  j["rows"] = rj;
  return j.dump(2) + "\n";
}

}  // namespace wassfem
