#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wassfem/sparse.hpp"

namespace wassfem {

struct CgOptions {
  double tol = 1e-10;        // relative to ||b|| (after projection)
  int max_iter = -1;         // <= 0 means 20 x size
  bool deflate_constants = false;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b||
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// (semi-)definite systems. With `deflate_constants`, b is projected to mean
/// zero, the iteration stays in the mean-zero subspace and the returned x
/// has zero mean (the minimum-norm solution for a constant null space).
/// `x0` is an optional initial guess. Throws SolverError on
/// non-convergence.
CgResult cg_solve(const SparseSymMatrix& A, std::span<const double> b, const CgOptions& opts,
                  std::span<const double> x0 = {});

/// Sparse LDL^T factorization (fill-reducing ordering), factored once and
/// reused for many right-hand sides. With `constant_null_space` the matrix
/// may be singular with null space span{1}: one diagonal entry is doubled to
/// pin the constant, and solutions are returned with zero mean for
/// right-hand sides projected to mean zero.
class DirectSolver {
 public:
  DirectSolver(const SparseSymMatrix& A, bool constant_null_space);
  ~DirectSolver();
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;

  int size() const { return n_; }
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
  bool deflate_ = false;
};

/// Dot product with a fixed summation order (chunked, independent of thread
/// count).
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace wassfem
