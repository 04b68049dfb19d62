#include "lnlm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lnlm {

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
  CsrMatrix a;
  a.rows = static_cast<std::size_t>(dense.rows());
  a.cols = static_cast<std::size_t>(dense.cols());
  a.row_ptr.assign(a.rows + 1, 0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      double v = dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) {
        a.col_idx.push_back(j);
        a.values.push_back(v);
      }
    }
    a.row_ptr[i + 1] = a.values.size();
  }
  return a;
}

Matrix CsrMatrix::to_dense() const {
  Matrix d = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx[k])) = values[k];
  return d;
}

namespace kernels {

namespace {
constexpr Eigen::Index kColumnBlock = 32;
}

Matrix spmm(const CsrMatrix& a, const Matrix& x) {
  const auto n = static_cast<std::int64_t>(a.rows);
  Matrix out = Matrix::Zero(n, x.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      row.noalias() += a.values[k] * x.row(static_cast<Eigen::Index>(a.col_idx[k]));
  }
  return out;
}

double sparse_gram_trace(const CsrMatrix& a, const Matrix& z) {
  const auto n = static_cast<std::int64_t>(a.rows);
  std::vector<double> partial(a.rows, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      s += a.values[k] * z.row(i).dot(z.row(static_cast<Eigen::Index>(a.col_idx[k])));
    partial[i] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

void multiplicative_step(Matrix& x, const Matrix& num, const Matrix& den, double eps) {
  const auto rows = static_cast<std::int64_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    x.row(i).array() *= num.row(i).array() / (den.row(i).array() + eps);
}

Matrix walk_log_matrix(const CsrMatrix& a, std::span<const double> degree, double volume,
                       int window, double neg_b) {
  const auto n = static_cast<Eigen::Index>(a.rows);
  Matrix m(n, n);
  const Eigen::Index blocks = (n + kColumnBlock - 1) / kColumnBlock;
  const double scale = volume / (static_cast<double>(window) * neg_b);

#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index c0 = b * kColumnBlock;
    const Eigen::Index w = std::min(kColumnBlock, n - c0);
    Matrix y = Matrix::Zero(n, w);
    for (Eigen::Index c = 0; c < w; ++c) y(c0 + c, c) = 1.0 / degree[c0 + c];
    Matrix acc = Matrix::Zero(n, w);
    Matrix next(n, w);
    for (int r = 0; r < window; ++r) {
      next.setZero();
      for (Eigen::Index i = 0; i < n; ++i) {
        auto row = next.row(i);
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
          row.noalias() += a.values[k] * y.row(static_cast<Eigen::Index>(a.col_idx[k]));
        row /= degree[i];
      }
      y.swap(next);
      acc += y;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < w; ++c) m(i, c0 + c) = std::log(std::max(scale * acc(i, c), 1.0));
  }
  return m;
}

void nearest_centers(const Matrix& x, const Matrix& centers, std::vector<int>& label,
                     std::vector<double>& dist2) {
  const auto n = static_cast<std::int64_t>(x.rows());
  label.assign(static_cast<std::size_t>(n), 0);
  dist2.assign(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      double d = (x.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    label[i] = arg;
    dist2[i] = best;
  }
}

}  // namespace kernels
}  // namespace lnlm
