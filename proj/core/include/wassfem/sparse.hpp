#pragma once

#include <span>
#include <vector>

namespace wassfem {

/// Compressed-row storage for symmetric matrices (both triangles stored).
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  SparseSymMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> vals);

  int size() const { return n_; }
  std::size_t nonzeros() const { return vals_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& vals() const { return vals_; }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  /// Entry (i, j), zero when not stored.
  double coeff(int i, int j) const;
  double sum_of_entries() const;
  /// Largest |A_ij - A_ji| relative to the largest |A_ij|.
  double asymmetry() const;

  /// a * A + b * B (patterns merged).
  friend SparseSymMatrix linear_combination(double a, const SparseSymMatrix& A, double b,
                                            const SparseSymMatrix& B);

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

SparseSymMatrix linear_combination(double a, const SparseSymMatrix& A, double b,
                                   const SparseSymMatrix& B);

/// Assembles sum over cells of the same dense local matrix scattered through
/// each cell's DOF list. Accumulation order is fixed (row by row, cells in
/// increasing order), so the result does not depend on scheduling.
SparseSymMatrix assemble_uniform_cells(int n, int local_size, std::span<const int> cell_dofs,
                                       std::span<const double> local_matrix);

}  // namespace wassfem
