#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wassfem/errors.hpp"
#include "wassfem/io.hpp"

namespace wassfem {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace

bool reconstruct(const Discretization& disc, const CoefficientField& alpha, const Point& tx,
                 std::array<double, 3>& value) {
  const SpaceTimeMesh& mesh = *disc.mesh;
  const SpatialMesh& sm = mesh.spatial();
  const int sd = sm.dim();
  const int n = disc.k + 1;
  const Box& dom = sm.domain();
  if (tx[0] < 0.0 || tx[0] > 1.0) return false;
  std::array<int, 2> mi{0, 0};
  std::array<double, 3> local{};
  const int nt = mesh.num_intervals();
  const int j = std::clamp(static_cast<int>(std::floor(tx[0] * nt)), 0, nt - 1);
  local[0] = (tx[0] - mesh.interval_start(j)) / mesh.dt();
  for (int a = 0; a < sd; ++a) {
    const double x = tx[a + 1];
    const double tol = 1e-12 * dom.extent(a);
    if (x < dom.lower[a] - tol || x > dom.upper[a] + tol) return false;
    const double h = sm.spacing(a);
    mi[a] = std::clamp(static_cast<int>(std::floor((x - dom.lower[a]) / h)), 0, sm.cells_per_axis(a) - 1);
    local[a + 1] = (x - dom.lower[a]) / h - mi[a];
  }
  const int l = sm.active_index(sm.linear_index(mi));
  if (l < 0) return false;
  const std::vector<double>& nodes = disc.w.rule_1d().nodes;
  // barycentric weights; each axis contraction divides by its weight sum, so
  // constants are reproduced exactly
  std::array<std::vector<double>, 3> coef;
  std::array<double, 3> coef_sum{};
  for (int a = 0; a <= sd; ++a) {
    coef[a].assign(n, 0.0);
    int hit = -1;
    for (int i = 0; i < n; ++i) {
      if (local[a] == nodes[i]) hit = i;
    }
    if (hit >= 0) {
      coef[a][hit] = 1.0;
      coef_sum[a] = 1.0;
      continue;
    }
    for (int i = 0; i < n; ++i) {
      double w = 1.0;
      for (int m = 0; m < n; ++m) {
        if (m != i) w /= nodes[i] - nodes[m];
      }
      coef[a][i] = w / (local[a] - nodes[i]);
      coef_sum[a] += coef[a][i];
    }
  }
  const int dim = disc.dim();
  const int ppc = disc.w.points_per_cell();
  const std::size_t base = static_cast<std::size_t>(mesh.cell_index(j, l)) * ppc;
  std::vector<double> buf(ppc);
  value = {0.0, 0.0, 0.0};
  for (int c = 0; c < dim; ++c) {
    for (int p = 0; p < ppc; ++p) buf[p] = alpha(base + p, c);
    // local point index has time slowest, the last spatial axis fastest
    int len = ppc;
    for (int a = sd; a >= 0; --a) {
      len /= n;
      for (int q = 0; q < len; ++q) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += coef[a][i] * buf[q * n + i];
        buf[q] = acc / coef_sum[a];
      }
    }
    value[c] = buf[0];
  }
  return true;
}

Snapshot sample_snapshot(const Discretization& disc, const CoefficientField& alpha, double t,
                         int resolution) {
  if (t < 0.0 || t > 1.0) throw ArgumentError("snapshot: t must lie in [0, 1]");
  if (resolution < 1) throw ArgumentError("snapshot: resolution must be positive");
  const SpatialMesh& sm = disc.mesh->spatial();
  const Box& dom = sm.domain();
  Snapshot s;
  s.t = t;
  s.dim = sm.dim();
  s.resolution = {resolution, s.dim == 2 ? resolution : 1};
  for (int i = 0; i < s.resolution[0]; ++i) {
    for (int r = 0; r < s.resolution[1]; ++r) {
      Point x{};
      x[0] = dom.lower[0] + (i + 0.5) * dom.extent(0) / resolution;
      // second axis runs top to bottom, matching raster rows
      if (s.dim == 2) x[1] = dom.upper[1] - (r + 0.5) * dom.extent(1) / resolution;
      std::array<double, 3> v{};
      const bool ok = reconstruct(disc, alpha, {t, x[0], x[1]}, v);
      s.points.push_back(x);
      s.active.push_back(ok);
      s.rho.push_back(ok ? v[0] : 0.0);
      s.momentum.push_back({ok ? v[1] : 0.0, ok && s.dim == 2 ? v[2] : 0.0});
    }
  }
  return s;
}

void export_snapshot(const Discretization& disc, const CoefficientField& alpha, double t,
                     int resolution, const std::string& csv_path, const std::string& raster_path) {
  const Snapshot s = sample_snapshot(disc, alpha, t, resolution);
  {
    std::ofstream out = open_out(csv_path);
    out << (s.dim == 2 ? "x,y,rho,mx,my\n" : "x,rho,mx\n");
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (!s.active[i]) continue;
      out << fmt(s.points[i][0]);
      if (s.dim == 2) out << ',' << fmt(s.points[i][1]);
      out << ',' << fmt(s.rho[i]) << ',' << fmt(s.momentum[i][0]);
      if (s.dim == 2) out << ',' << fmt(s.momentum[i][1]);
      out << '\n';
    }
    finish(out, csv_path);
  }
  if (raster_path.empty()) return;
  double mx = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (s.active[i]) mx = std::max(mx, s.rho[i]);
  }
  GrayImage img;
  img.width = s.resolution[0];
  img.height = s.resolution[1];
  img.maxval = 255;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);
  for (int i = 0; i < img.width; ++i) {
    for (int r = 0; r < img.height; ++r) {
      const std::size_t idx = static_cast<std::size_t>(i) * img.height + r;
      if (!s.active[idx] || !(mx > 0.0)) continue;
      const double v = std::clamp(s.rho[idx] / mx, 0.0, 1.0);
      img.pixels[static_cast<std::size_t>(r) * img.width + i] = static_cast<int>(std::lround(255.0 * v));
    }
  }
  write_pgm(raster_path, img);
}

void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& log,
                         bool include_timing) {
  std::ofstream out = open_out(path);
  out << "iter,err_a,err_r,cg_iters,seconds\n";
  for (const IterationRecord& r : log) {
    out << r.iteration << ',' << fmt(r.err_a) << ',' << fmt(r.err_r) << ',' << r.cg_iterations << ','
        << fmt(include_timing ? r.seconds : 0.0) << '\n';
  }
  finish(out, path);
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  std::ostringstream os;
  os << "k,level,cells,l2_rho,order_rho,l2_m,order_m,w2_error,order_w2,iterations,converged,error\n";
  for (const ConvergenceRow& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.k << ',' << r.level << ',' << r.cells << ',' << opt(r.l2_rho) << ',' << opt(r.order_rho) << ','
       << opt(r.l2_m) << ',' << opt(r.order_m) << ',' << opt(r.w2_error) << ',' << opt(r.order_w2) << ','
       << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << err << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace wassfem
