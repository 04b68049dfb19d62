#include "lnlm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lnlm::kernels::serial {

Matrix spmm(const CsrMatrix& a, const Matrix& x) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(a.rows), x.cols());
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      for (Eigen::Index c = 0; c < x.cols(); ++c)
        out(static_cast<Eigen::Index>(i), c) +=
            a.values[k] * x(static_cast<Eigen::Index>(a.col_idx[k]), c);
  return out;
}

double sparse_gram_trace(const CsrMatrix& a, const Matrix& z) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      double dot = 0.0;
      for (Eigen::Index c = 0; c < z.cols(); ++c)
        dot += z(static_cast<Eigen::Index>(i), c) * z(static_cast<Eigen::Index>(a.col_idx[k]), c);
      s += a.values[k] * dot;
    }
    total += s;
  }
  return total;
}

void multiplicative_step(Matrix& x, const Matrix& num, const Matrix& den, double eps) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) *= num(i, j) / (den(i, j) + eps);
}

// Whole-matrix version of the blocked walk: Y_r = D^-1 A Y_{r-1}, Y_0 = D^-1.
Matrix walk_log_matrix(const CsrMatrix& a, std::span<const double> degree, double volume,
                       int window, double neg_b) {
  const auto n = static_cast<Eigen::Index>(a.rows);
  Matrix y = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) y(i, i) = 1.0 / degree[i];
  Matrix acc = Matrix::Zero(n, n);
  for (int r = 0; r < window; ++r) {
    y = spmm(a, y);
    for (Eigen::Index i = 0; i < n; ++i) y.row(i) /= degree[i];
    acc += y;
  }
  const double scale = volume / (static_cast<double>(window) * neg_b);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = std::log(std::max(scale * acc(i, j), 1.0));
  return m;
}

void nearest_centers(const Matrix& x, const Matrix& centers, std::vector<int>& label,
                     std::vector<double>& dist2) {
  label.assign(static_cast<std::size_t>(x.rows()), 0);
  dist2.assign(static_cast<std::size_t>(x.rows()), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      double d = 0.0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double diff = x(i, j) - centers(c, j);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        label[static_cast<std::size_t>(i)] = static_cast<int>(c);
      }
    }
    dist2[static_cast<std::size_t>(i)] = best;
  }
}

}  // namespace lnlm::kernels::serial
