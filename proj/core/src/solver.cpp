#include "wassfem/solver.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "wassfem/errors.hpp"

namespace wassfem {

double dot(std::span<const double> a, std::span<const double> b) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t n = a.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
#ifdef WASSFEM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::size_t c = 0; c < nchunks; ++c) {
    double s = 0.0;
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) s += a[i] * b[i];
    partial[c] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

namespace {

void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

CgResult cg_solve(const SparseSymMatrix& A, std::span<const double> b_in, const CgOptions& opts,
                  std::span<const double> x0) {
  const int n = A.size();
  if (static_cast<int>(b_in.size()) != n) throw ArgumentError("cg_solve: size mismatch");
  if (!x0.empty() && static_cast<int>(x0.size()) != n) throw ArgumentError("cg_solve: x0 size mismatch");
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 20 * std::max(n, 1);

  std::vector<double> b(b_in.begin(), b_in.end());
  if (opts.deflate_constants) remove_mean(b);

  CgResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) {
    res.x.assign(x0.begin(), x0.end());
    if (opts.deflate_constants) remove_mean(res.x);
  }
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    return res;
  }

  std::vector<double> inv_diag = A.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(n), z(n), p(n), q(n);
  A.multiply(res.x, q);
  for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (opts.deflate_constants) remove_mean(r);
  double rnorm = std::sqrt(dot(r, r));
  const double target = opts.tol * bnorm;

  std::vector<double> best = res.x;
  double best_norm = rnorm;
  int it = 0;
  if (rnorm > target) {
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    if (opts.deflate_constants) remove_mean(z);
    p = z;
    double rz = dot(r, z);
    while (it < max_iter) {
      A.multiply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) break;
      const double step = rz / pq;
      for (int i = 0; i < n; ++i) {
        res.x[i] += step * p[i];
        r[i] -= step * q[i];
      }
      if (opts.deflate_constants) remove_mean(r);
      ++it;
      rnorm = std::sqrt(dot(r, r));
      if (rnorm < best_norm) {
        best_norm = rnorm;
        best = res.x;
      }
      if (rnorm <= target) break;
      for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      if (opts.deflate_constants) remove_mean(z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  if (opts.deflate_constants) remove_mean(res.x);

  // true residual, guards against drift of the recursive one
  A.multiply(res.x, q);
  for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
  res.residual = std::sqrt(dot(r, r)) / bnorm;
  res.iterations = it;
  if (rnorm > target) {
    if (opts.deflate_constants) remove_mean(best);
    std::ostringstream os;
    os << "cg_solve: no convergence after " << it << " iterations (relative residual "
       << res.residual << ", tol " << opts.tol << ")";
    throw SolverError(os.str(), std::move(best), best_norm / bnorm, it);
  }
  return res;
}

struct DirectSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

DirectSolver::DirectSolver(const SparseSymMatrix& A, bool constant_null_space)
    : impl_(std::make_unique<Impl>()), n_(A.size()), deflate_(constant_null_space) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.nonzeros());
  const auto& rp = A.row_ptr();
  const auto& cols = A.cols();
  const auto& vals = A.vals();
  for (int i = 0; i < n_; ++i) {
    for (int p = rp[i]; p < rp[i + 1]; ++p) trip.emplace_back(i, cols[p], vals[p]);
  }
  if (deflate_ && n_ > 0) trip.emplace_back(n_ - 1, n_ - 1, A.coeff(n_ - 1, n_ - 1));
  Eigen::SparseMatrix<double> M(n_, n_);
  M.setFromTriplets(trip.begin(), trip.end());
  impl_->ldlt.compute(M);
  if (impl_->ldlt.info() != Eigen::Success) {
    throw SolverError("DirectSolver: factorization failed", {}, 0.0, 0);
  }
}

DirectSolver::~DirectSolver() = default;

std::vector<double> DirectSolver::solve(std::span<const double> b_in) const {
  if (static_cast<int>(b_in.size()) != n_) throw ArgumentError("DirectSolver: size mismatch");
  std::vector<double> b(b_in.begin(), b_in.end());
  if (deflate_) remove_mean(b);
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), n_);
  const Eigen::VectorXd xv = impl_->ldlt.solve(bv);
  std::vector<double> x(xv.data(), xv.data() + n_);
  if (deflate_) remove_mean(x);
  return x;
}

}  // namespace wassfem
