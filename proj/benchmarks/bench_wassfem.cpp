#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>

#include "wassfem/alg2.hpp"

using namespace wassfem;

namespace {

std::shared_ptr<const Discretization> disc_1d(int n, int k) {
  Box b;
  b.dim = 1;
  b.lower[0] = 0.0;
  b.upper[0] = 1.0;
  auto mesh = std::make_shared<const SpaceTimeMesh>(build_spatial_mesh(b, {n, 1}), n);
  return std::make_shared<const Discretization>(mesh, k);
}

std::shared_ptr<const Discretization> disc_2d(int n, int k) {
  Box b;
  b.dim = 2;
  b.lower = {0.0, 0.0, 0.0};
  b.upper = {1.0, 1.0, 0.0};
  auto mesh = std::make_shared<const SpaceTimeMesh>(build_spatial_mesh(b, {n, n}), n);
  return std::make_shared<const Discretization>(mesh, k);
}

ProblemSpec wave_problem(const Discretization& d) {
  TravelingWave tw;
  tw.dim = d.mesh->spatial().dim();
  ProblemSpec s;
  s.exact = tw.exact();
  s.boundary_flux = tw.boundary_flux();
  s.rho0 = sample_m(d.m, [&](const Point& x) { return tw.rho({0.0, x[0], x[1]}); });
  s.rho1 = sample_m(d.m, [&](const Point& x) { return tw.rho({1.0, x[0], x[1]}); });
  return s;
}

void BM_Prox(benchmark::State& state) {
  CostModel m;
  m.kind = static_cast<CostCase>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::array<double, 3>> bs(1024);
  for (auto& b : bs) b = {u(rng), u(rng), u(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_alpha(m, bs[i++ % bs.size()], 1.0));
  }
  state.SetLabel(to_string(m.kind));
}
BENCHMARK(BM_Prox)->DenseRange(1, 5);

void BM_AssembleStiffness(benchmark::State& state) {
  auto d = disc_2d(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(d->v));
  state.counters["dofs"] = d->v.num_dofs();
}
BENCHMARK(BM_AssembleStiffness)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_StepASolve(benchmark::State& state) {
  auto d = disc_2d(8, 1);
  const SparseSymMatrix K = assemble_stiffness(d->v);
  std::vector<double> b(K.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.37 * i);
  if (state.range(0) == 0) {
    const DirectSolver solver(K, true);
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(b));
    state.SetLabel("direct");
  } else {
    CgOptions o;
    o.deflate_constants = true;
    for (auto _ : state) benchmark::DoNotOptimize(cg_solve(K, b, o));
    state.SetLabel("cg");
  }
}
BENCHMARK(BM_StepASolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Alg2Iteration(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  auto d = disc_1d(32 / (k + 1), k);
  const Alg2Solver solver(d, wave_problem(*d));
  Alg2State st = solver.initial_state();
  for (auto _ : state) benchmark::DoNotOptimize(solver.iterate(st));
  state.counters["v_dofs"] = d->v.num_dofs();
}
BENCHMARK(BM_Alg2Iteration)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
