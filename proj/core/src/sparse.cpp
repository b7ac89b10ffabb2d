#include "wassfem/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "wassfem/errors.hpp"

namespace wassfem {

SparseSymMatrix::SparseSymMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols,
                                 std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (static_cast<int>(row_ptr_.size()) != n_ + 1 || cols_.size() != vals_.size()) {
    throw ArgumentError("SparseSymMatrix: inconsistent CSR arrays");
  }
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
#ifdef WASSFEM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseSymMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i) d[i] = coeff(i, i);
  return d;
}

double SparseSymMatrix::coeff(int i, int j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return vals_[it - cols_.begin()];
}

double SparseSymMatrix::sum_of_entries() const {
  // Neumaier summation
  double s = 0.0, comp = 0.0;
  for (double v : vals_) {
    const double t = s + v;
    comp += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + comp;
}

double SparseSymMatrix::asymmetry() const {
  double amax = 0.0;
  double dmax = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      amax = std::max(amax, std::abs(vals_[k]));
      dmax = std::max(dmax, std::abs(vals_[k] - coeff(cols_[k], i)));
    }
  }
  return amax > 0.0 ? dmax / amax : 0.0;
}

SparseSymMatrix linear_combination(double a, const SparseSymMatrix& A, double b,
                                   const SparseSymMatrix& B) {
  if (A.n_ != B.n_) throw ArgumentError("linear_combination: size mismatch");
  std::vector<int> rp(A.n_ + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(std::max(A.nonzeros(), B.nonzeros()));
  vals.reserve(cols.capacity());
  for (int i = 0; i < A.n_; ++i) {
    int ka = A.row_ptr_[i];
    int kb = B.row_ptr_[i];
    const int ea = A.row_ptr_[i + 1];
    const int eb = B.row_ptr_[i + 1];
    while (ka < ea || kb < eb) {
      const int ca = ka < ea ? A.cols_[ka] : A.n_;
      const int cb = kb < eb ? B.cols_[kb] : B.n_;
      if (ca == cb) {
        cols.push_back(ca);
        vals.push_back(a * A.vals_[ka++] + b * B.vals_[kb++]);
      } else if (ca < cb) {
        cols.push_back(ca);
        vals.push_back(a * A.vals_[ka++]);
      } else {
        cols.push_back(cb);
        vals.push_back(b * B.vals_[kb++]);
      }
    }
    rp[i + 1] = static_cast<int>(cols.size());
  }
  return SparseSymMatrix(A.n_, std::move(rp), std::move(cols), std::move(vals));
}

SparseSymMatrix assemble_uniform_cells(int n, int local_size, std::span<const int> cell_dofs,
                                       std::span<const double> local_matrix) {
  const int ncells = static_cast<int>(cell_dofs.size() / local_size);
  // dof -> (cell, local index) incidence
  std::vector<int> inc_ptr(n + 1, 0);
  for (int d : cell_dofs) ++inc_ptr[d + 1];
  for (int i = 0; i < n; ++i) inc_ptr[i + 1] += inc_ptr[i];
  std::vector<int> inc(cell_dofs.size());
  {
    std::vector<int> fill(inc_ptr.begin(), inc_ptr.end() - 1);
    for (std::size_t k = 0; k < cell_dofs.size(); ++k) inc[fill[cell_dofs[k]]++] = static_cast<int>(k);
  }
  (void)ncells;

  std::vector<int> rp(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  std::vector<double> work(n, 0.0);
  std::vector<char> mark(n, 0);
  std::vector<int> touched;
  for (int r = 0; r < n; ++r) {
    touched.clear();
    for (int e = inc_ptr[r]; e < inc_ptr[r + 1]; ++e) {
      const int k = inc[e];
      const int cell = k / local_size;
      const int i = k % local_size;
      const int* dofs = cell_dofs.data() + static_cast<std::size_t>(cell) * local_size;
      const double* row = local_matrix.data() + static_cast<std::size_t>(i) * local_size;
      for (int j = 0; j < local_size; ++j) {
        const int c = dofs[j];
        if (!mark[c]) {
          mark[c] = 1;
          touched.push_back(c);
        }
        work[c] += row[j];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int c : touched) {
      cols.push_back(c);
      vals.push_back(work[c]);
      work[c] = 0.0;
      mark[c] = 0;
    }
    rp[r + 1] = static_cast<int>(cols.size());
  }
  return SparseSymMatrix(n, std::move(rp), std::move(cols), std::move(vals));
}

}  // namespace wassfem
