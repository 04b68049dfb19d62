#pragma once

#include "lnlm/common.hpp"
#include "lnlm/graph.hpp"
#include "lnlm/loworder.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace lnlm {

struct LnlmHyperParams {
  double alpha = 50.0;
  double beta = 20.0;
  double gamma = 20.0;
  int m = 200;   // local feature dimension
  int k = 128;   // embedding dimension
  double delta = 1e-4;
  int max_iter = 1000;
  std::uint64_t seed = 1;

  void validate(std::size_t n) const;
};

// Z: n x m, V: n x k, U: k x m, H: k x d. All entries non-negative.
struct Factors {
  Matrix z;
  Matrix v;
  Matrix u;
  Matrix h;
};

struct LossTerms {
  double adjacency = 0.0;  // ||A - Z Z^T||^2
  double local = 0.0;      // ||Z - V U||^2
  double features = 0.0;   // ||V H - B||^2
  double penalty = 0.0;    // ||U||^2 + ||H||^2
  double total = 0.0;      // weighted sum
};

struct EmbeddingModel {
  Factors factors;
  std::vector<std::pair<int, double>> loss_trace;  // (iteration, loss); iteration 0 is the start
  bool converged = false;
  int iterations_run = 0;
  int z_backtracks = 0;  // sweeps where the plain Z step was damped
};

inline constexpr double kUpdateEps = 1e-12;
inline constexpr double kInitLow = 1e-6;

// I.i.d. uniform on (1e-6, 1], drawn in the order Z, V, U, H, row-major.
Factors init_factors(std::size_t n, int m, int k, int d, std::uint64_t seed);

LossTerms loss_terms(const CsrMatrix& a, const Matrix& b, const Factors& f,
                     const LnlmHyperParams& h);
double loss(const CsrMatrix& a, const Matrix& b, const Factors& f, const LnlmHyperParams& h);

// Multiplicative updates. Each returns the new factor and leaves `f` intact.
//
// The feature matrix B is signed (it comes from an SVD), so the linear terms
// involving it are split into positive and negative parts: the positive part
// stays in the numerator, the negative part moves to the denominator. For a
// non-negative B this is exactly
//   V <- V * (a Z U^T + b B H^T) / (a V U U^T + b V H H^T)
//   H <- H * (b V^T B) / (b V^T V H + g H)
Matrix update_z(const CsrMatrix& a, const Factors& f, double alpha);
Matrix update_v(const Matrix& b, const Factors& f, double alpha, double beta);
Matrix update_h(const Matrix& b, const Factors& f, double beta, double gamma);
Matrix update_u(const Factors& f, double alpha, double gamma);

// Max over the four factors of ||grad (.) factor||_inf.
double kkt_residual(const CsrMatrix& a, const Matrix& b, const Factors& f,
                    const LnlmHyperParams& h);

struct KktParts {
  double z = 0.0, v = 0.0, u = 0.0, h = 0.0;
};
KktParts kkt_residual_parts(const CsrMatrix& a, const Matrix& b, const Factors& f,
                            const LnlmHyperParams& h);

// Alternating updates Z, V, H, U until the relative loss decrease drops below
// delta or max_iter sweeps have run. Throws NumericError if the loss rises.
EmbeddingModel fit(const CsrMatrix& a, const Matrix& b, const LnlmHyperParams& h);
EmbeddingModel fit(const Graph& g, const FeatureMatrix& features, const LnlmHyperParams& h);

}  // namespace lnlm
