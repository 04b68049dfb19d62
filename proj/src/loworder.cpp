#include "lnlm/loworder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lnlm {

void LowOrderParams::validate(std::size_t n) const {
  if (window < 1) throw InputError("window size T must be >= 1");
  if (!(neg_b > 0.0) || !std::isfinite(neg_b)) throw InputError("negative sampling b must be > 0");
  if (dim < 1 || static_cast<std::size_t>(dim) > n)
    throw InputError("feature dimension d must lie in [1, n]");
}

void require_positive_degrees(const Graph& g) {
  auto deg = degrees(g);
  for (std::size_t i = 0; i < deg.size(); ++i)
    if (!(deg[i] > 0.0))
      throw InputError("node " + std::to_string(g.original_ids()[i]) +
                       " is isolated; use --restrict-lcc or remove it");
}

Matrix transition_matrix(const Graph& g) {
  require_positive_degrees(g);
  auto deg = degrees(g);
  const auto& a = g.adjacency();
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.col_idx[k])) =
          a.values[k] / deg[i];
  return p;
}

Matrix netmf_matrix(const Graph& g, const LowOrderParams& p) {
  if (p.window < 1) throw InputError("window size T must be >= 1");
  if (!(p.neg_b > 0.0)) throw InputError("negative sampling b must be > 0");
  require_positive_degrees(g);
  auto deg = degrees(g);
  Matrix m = kernels::walk_log_matrix(g.adjacency(), deg, volume(g), p.window, p.neg_b);
  if (!m.allFinite()) throw NumericError("walk matrix has non-finite entries");
  return m;
}

namespace {

Matrix orthonormal_basis(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  Matrix q = qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
  return q;
}

void fix_signs(SvdResult& r) {
  for (Eigen::Index c = 0; c < r.u.cols(); ++c) {
    Eigen::Index arg = 0;
    r.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (r.u(arg, c) < 0.0) {
      r.u.col(c) *= -1.0;
      r.v.col(c) *= -1.0;
    }
  }
}

}  // namespace

SvdResult truncated_svd_factors(const Matrix& m, int d, std::uint64_t seed, SvdMethod method,
                                int oversample, int power_iters) {
  if (d < 1) throw InputError("SVD rank must be >= 1");
  const Eigen::Index rank = d;
  const Eigen::Index small = std::min(m.rows(), m.cols());
  if (rank > small) throw InputError("SVD rank exceeds matrix dimensions");
  if (!m.allFinite()) throw InputError("SVD input has non-finite entries");

  const Eigen::Index sketch = std::min(small, rank + oversample);
  if (method == SvdMethod::Auto)
    method = (small <= std::max<Eigen::Index>(256, 2 * sketch)) ? SvdMethod::Exact
                                                                : SvdMethod::Randomized;

  SvdResult r;
  if (method == SvdMethod::Exact) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.u = svd.matrixU().leftCols(rank);
    r.v = svd.matrixV().leftCols(rank);
    for (Eigen::Index i = 0; i < rank; ++i) r.sigma.push_back(svd.singularValues()(i));
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix omega(m.cols(), sketch);
    for (Eigen::Index i = 0; i < omega.rows(); ++i)
      for (Eigen::Index j = 0; j < omega.cols(); ++j) omega(i, j) = gauss(rng);

    Matrix q = orthonormal_basis(m * omega);
    for (int it = 0; it < power_iters; ++it) {
      Matrix w = orthonormal_basis(m.transpose() * q);
      q = orthonormal_basis(m * w);
    }
    Matrix projected = q.transpose() * m;  // sketch x cols
    Eigen::BDCSVD<Matrix> svd(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.u = q * svd.matrixU().leftCols(rank);
    r.v = svd.matrixV().leftCols(rank);
    for (Eigen::Index i = 0; i < rank; ++i) r.sigma.push_back(svd.singularValues()(i));
  }
  fix_signs(r);
  return r;
}

FeatureMatrix truncated_svd(const Matrix& m, int d, std::uint64_t seed, SvdMethod method) {
  SvdResult r = truncated_svd_factors(m, d, seed, method);
  FeatureMatrix f;
  f.b = r.u;
  for (Eigen::Index c = 0; c < f.b.cols(); ++c)
    f.b.col(c) *= std::sqrt(r.sigma[static_cast<std::size_t>(c)]);
  f.singular_values = std::move(r.sigma);
  if (!f.b.allFinite()) throw NumericError("feature matrix has non-finite entries");
  return f;
}

FeatureMatrix build_loworder_features(const Graph& g, const LowOrderParams& p,
                                      std::uint64_t seed) {
  if (g.num_edges() == 0) throw InputError("graph has no edges");
  p.validate(g.num_nodes());
  return truncated_svd(netmf_matrix(g, p), p.dim, seed);
}

}  // namespace lnlm
