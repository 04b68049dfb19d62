#include "lnlm/solver.hpp"

#include "lnlm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lnlm {

void LnlmHyperParams::validate(std::size_t n) const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw InputError("alpha, beta and gamma must be positive");
  if (m < 1 || static_cast<std::size_t>(m) > n) throw InputError("m must lie in [1, n]");
  if (k < 1 || static_cast<std::size_t>(k) > n) throw InputError("k must lie in [1, n]");
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  if (max_iter < 0) throw InputError("max_iter must be non-negative");
}

Factors init_factors(std::size_t n, int m, int k, int d, std::uint64_t seed) {
  if (n == 0 || m < 1 || k < 1 || d < 1) throw InputError("factor dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0 - kInitLow);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix x(rows, cols);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 1.0 - unit(rng);  // (lo, 1]
    return x;
  };
  const auto rows = static_cast<Eigen::Index>(n);
  Factors f;
  f.z = draw(rows, m);
  f.v = draw(rows, k);
  f.u = draw(k, m);
  f.h = draw(k, d);
  return f;
}

namespace {

void check_shapes(const CsrMatrix& a, const Matrix& b, const Factors& f) {
  const auto n = static_cast<Eigen::Index>(a.rows);
  const bool ok = a.rows == a.cols && f.z.rows() == n && f.v.rows() == n && b.rows() == n &&
                  f.u.rows() == f.v.cols() && f.u.cols() == f.z.cols() &&
                  f.h.rows() == f.v.cols() && f.h.cols() == b.cols();
  if (!ok) throw InputError("factor shapes are inconsistent with A and B");
}

double squared_norm(const CsrMatrix& a) {
  double s = 0.0;
  for (double x : a.values) s += x * x;
  return s;
}

// ||A - Z Z^T||^2 expanded so that only the stored entries of A are touched.
double adjacency_residual(const CsrMatrix& a, double a_sq, const Matrix& z) {
  const Matrix gram = z.transpose() * z;
  const double r = a_sq - 2.0 * kernels::sparse_gram_trace(a, z) + gram.squaredNorm();
  return std::max(r, 0.0);
}

void require_finite(const Matrix& x, const char* name) {
  if (!x.allFinite()) throw NumericError(std::string("non-finite entries after updating ") + name);
}

Matrix positive_part(const Matrix& x) { return x.cwiseMax(0.0); }
Matrix negative_part(const Matrix& x) { return (-x).cwiseMax(0.0); }

}  // namespace

LossTerms loss_terms(const CsrMatrix& a, const Matrix& b, const Factors& f,
                     const LnlmHyperParams& h) {
  check_shapes(a, b, f);
  LossTerms t;
  t.adjacency = adjacency_residual(a, squared_norm(a), f.z);
  t.local = (f.z - f.v * f.u).squaredNorm();
  t.features = (f.v * f.h - b).squaredNorm();
  t.penalty = f.u.squaredNorm() + f.h.squaredNorm();
  t.total = t.adjacency + h.alpha * t.local + h.beta * t.features + h.gamma * t.penalty;
  return t;
}

double loss(const CsrMatrix& a, const Matrix& b, const Factors& f, const LnlmHyperParams& h) {
  return loss_terms(a, b, f, h).total;
}

namespace {

// Shared kernels of the update rules; `gram` = Z^T Z, `vu` = V U, `vtv` = V^T V.
Matrix z_step(const CsrMatrix& a, const Matrix& z, const Matrix& gram, const Matrix& vu, double alpha) {
  const Matrix num = 2.0 * kernels::spmm(a, z) + alpha * vu;
  const Matrix den = 2.0 * (z * gram) + alpha * z;
  Matrix out = z;
  kernels::multiplicative_step(out, num, den, kUpdateEps);
  require_finite(out, "Z");
  return out;
}

Matrix h_step(const Matrix& b, const Factors& f, const Matrix& vtv, double beta, double gamma) {
  const Matrix vb = f.v.transpose() * b;
  const Matrix num = beta * positive_part(vb);
  const Matrix den = beta * (vtv * f.h) + gamma * f.h + beta * negative_part(vb);
  Matrix h = f.h;
  kernels::multiplicative_step(h, num, den, kUpdateEps);
  require_finite(h, "H");
  return h;
}

Matrix u_step(const Factors& f, const Matrix& vtv, double alpha, double gamma) {
  const Matrix num = alpha * (f.v.transpose() * f.z);
  const Matrix den = alpha * (vtv * f.u) + gamma * f.u;
  Matrix u = f.u;
  kernels::multiplicative_step(u, num, den, kUpdateEps);
  require_finite(u, "U");
  return u;
}

}  // namespace

Matrix update_z(const CsrMatrix& a, const Factors& f, double alpha) {
  return z_step(a, f.z, f.z.transpose() * f.z, f.v * f.u, alpha);
}

Matrix update_v(const Matrix& b, const Factors& f, double alpha, double beta) {
  const Matrix bh = b * f.h.transpose();
  const Matrix num = alpha * (f.z * f.u.transpose()) + beta * positive_part(bh);
  const Matrix den = f.v * (alpha * (f.u * f.u.transpose()) + beta * (f.h * f.h.transpose())) +
                     beta * negative_part(bh);
  Matrix v = f.v;
  kernels::multiplicative_step(v, num, den, kUpdateEps);
  require_finite(v, "V");
  return v;
}

Matrix update_h(const Matrix& b, const Factors& f, double beta, double gamma) {
  return h_step(b, f, f.v.transpose() * f.v, beta, gamma);
}

Matrix update_u(const Factors& f, double alpha, double gamma) {
  return u_step(f, f.v.transpose() * f.v, alpha, gamma);
}

KktParts kkt_residual_parts(const CsrMatrix& a, const Matrix& b, const Factors& f,
                            const LnlmHyperParams& h) {
  check_shapes(a, b, f);
  const Matrix vu = f.v * f.u;
  const Matrix vh = f.v * f.h;
  const Matrix gz = 4.0 * (f.z * (f.z.transpose() * f.z) - kernels::spmm(a, f.z)) +
                    2.0 * h.alpha * (f.z - vu);
  const Matrix gv = 2.0 * h.alpha * (vu - f.z) * f.u.transpose() +
                    2.0 * h.beta * (vh - b) * f.h.transpose();
  const Matrix gh = 2.0 * h.beta * f.v.transpose() * (vh - b) + 2.0 * h.gamma * f.h;
  const Matrix gu = 2.0 * h.alpha * f.v.transpose() * (vu - f.z) + 2.0 * h.gamma * f.u;
  auto slack = [](const Matrix& g, const Matrix& x) {
    return x.size() == 0 ? 0.0 : g.cwiseProduct(x).cwiseAbs().maxCoeff();
  };
  return {slack(gz, f.z), slack(gv, f.v), slack(gu, f.u), slack(gh, f.h)};
}

double kkt_residual(const CsrMatrix& a, const Matrix& b, const Factors& f,
                    const LnlmHyperParams& h) {
  auto p = kkt_residual_parts(a, b, f, h);
  return std::max({p.z, p.v, p.u, p.h});
}

EmbeddingModel fit(const CsrMatrix& a, const Matrix& b, const LnlmHyperParams& h) {
  const std::size_t n = a.rows;
  h.validate(n);
  if (static_cast<std::size_t>(b.rows()) != n)
    throw InputError("feature matrix row count does not match the graph");
  if (!b.allFinite()) throw InputError("feature matrix has non-finite entries");

  EmbeddingModel model;
  model.factors = init_factors(n, h.m, h.k, static_cast<int>(b.cols()), h.seed);
  Factors& f = model.factors;
  const double a_sq = squared_norm(a);

  Matrix gram = f.z.transpose() * f.z;
  Matrix vu = f.v * f.u;
  auto adjacency_from = [&](const Matrix& z, const Matrix& g) {
    return std::max(a_sq - 2.0 * kernels::sparse_gram_trace(a, z) + g.squaredNorm(), 0.0);
  };

  LossTerms terms = loss_terms(a, b, f, h);
  double previous = terms.total;
  model.loss_trace.emplace_back(0, previous);

  for (int it = 1; it <= h.max_iter; ++it) {
    // The plain Z step does not majorize the quartic term, so it is damped
    // towards the current Z whenever it would raise the Z-subproblem value.
    Matrix z_new = z_step(a, f.z, gram, vu, h.alpha);
    Matrix gram_new = z_new.transpose() * z_new;
    const double z_before = terms.adjacency + h.alpha * terms.local;
    double adj_new = adjacency_from(z_new, gram_new);
    if (adj_new + h.alpha * (z_new - vu).squaredNorm() > z_before) {
      ++model.z_backtracks;
      bool accepted = false;
      for (double eta = 0.5; eta > 1e-10; eta *= 0.5) {
        Matrix trial = f.z + eta * (z_new - f.z);
        Matrix trial_gram = trial.transpose() * trial;
        const double trial_adj = adjacency_from(trial, trial_gram);
        if (trial_adj + h.alpha * (trial - vu).squaredNorm() <= z_before) {
          z_new = std::move(trial);
          gram_new = std::move(trial_gram);
          adj_new = trial_adj;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        z_new = f.z;
        gram_new = gram;
        adj_new = terms.adjacency;
      }
    }
    f.z = std::move(z_new);
    gram = std::move(gram_new);
    f.v = update_v(b, f, h.alpha, h.beta);
    const Matrix vtv = f.v.transpose() * f.v;
    f.h = h_step(b, f, vtv, h.beta, h.gamma);
    f.u = u_step(f, vtv, h.alpha, h.gamma);
    vu = f.v * f.u;

    terms.adjacency = adj_new;
    terms.local = (f.z - vu).squaredNorm();
    terms.features = (f.v * f.h - b).squaredNorm();
    terms.penalty = f.u.squaredNorm() + f.h.squaredNorm();
    terms.total = terms.adjacency + h.alpha * terms.local + h.beta * terms.features + h.gamma * terms.penalty;
    const double current = terms.total;
    model.loss_trace.emplace_back(it, current);
    model.iterations_run = it;
    if (!std::isfinite(current)) throw NumericError("loss became non-finite");
    if (current > previous + 1e-9 + 1e-11 * previous)
      throw NumericError("loss increased at iteration " + std::to_string(it) + " (" +
                         std::to_string(previous) + " -> " + std::to_string(current) + ")");
    const double rel = previous > 0.0 ? (previous - current) / previous : 0.0;
    previous = current;
    if (rel < h.delta) {
      model.converged = true;
      break;
    }
  }
  return model;
}

EmbeddingModel fit(const Graph& g, const FeatureMatrix& features, const LnlmHyperParams& h) {
  require_positive_degrees(g);
  return fit(g.adjacency(), features.b, h);
}

}  // namespace lnlm
