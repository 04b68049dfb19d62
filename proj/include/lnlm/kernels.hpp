#pragma once

// Data-parallel kernels used by the feature builder, the solver and the
// evaluation code. Every kernel in `lnlm::kernels` has a single-threaded
// counterpart in `lnlm::kernels::serial` with the same contract; the serial
// versions are the reference the tests and benchmarks compare against.
//
// All reductions are performed per row into a buffer and then summed in row
// order, so results do not depend on the thread count.

#include "lnlm/common.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace lnlm {

// Compressed sparse row matrix. Column indices are sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }

  static CsrMatrix from_dense(const Matrix& dense);
  Matrix to_dense() const;
};

namespace kernels {

// A * X for sparse A.
Matrix spmm(const CsrMatrix& a, const Matrix& x);

// Sum over stored entries of A_ij * <Z_i, Z_j>, i.e. tr(Z^T A Z).
double sparse_gram_trace(const CsrMatrix& a, const Matrix& z);

// x <- x * num / (den + eps), element-wise.
void multiplicative_step(Matrix& x, const Matrix& num, const Matrix& den, double eps);

// Mean of the first `window` powers of P = D^-1 A, each right-multiplied by
// D^-1, then M = log(max(vol * S / b, 1)). Columns are processed in blocks.
Matrix walk_log_matrix(const CsrMatrix& a, std::span<const double> degree, double volume,
                       int window, double neg_b);

// Index of the nearest center for each row of x, plus the squared distance.
void nearest_centers(const Matrix& x, const Matrix& centers, std::vector<int>& label,
                     std::vector<double>& dist2);

namespace serial {

Matrix spmm(const CsrMatrix& a, const Matrix& x);
double sparse_gram_trace(const CsrMatrix& a, const Matrix& z);
void multiplicative_step(Matrix& x, const Matrix& num, const Matrix& den, double eps);
Matrix walk_log_matrix(const CsrMatrix& a, std::span<const double> degree, double volume,
                       int window, double neg_b);
void nearest_centers(const Matrix& x, const Matrix& centers, std::vector<int>& label,
                     std::vector<double>& dist2);

}  // namespace serial
}  // namespace kernels
}  // namespace lnlm
