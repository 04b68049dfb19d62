#pragma once

#include "lnlm/common.hpp"
#include "lnlm/graph.hpp"

#include <cstdint>
#include <vector>

namespace lnlm {

struct LowOrderParams {
  int window = 5;       // T
  double neg_b = 1.0;   // b
  int dim = 128;        // d

  void validate(std::size_t n) const;
};

// B = U_d * sqrt(Sigma_d) for the top-d singular triplets of M.
struct FeatureMatrix {
  Matrix b;
  std::vector<double> singular_values;  // descending
};

// D^-1 A as a dense matrix. Rows sum to one.
Matrix transition_matrix(const Graph& g);

// M = log(max(vol(G) / (b T) * sum_{r=1..T} (D^-1 A)^r D^-1, 1)).
Matrix netmf_matrix(const Graph& g, const LowOrderParams& p);

enum class SvdMethod { Auto, Exact, Randomized };

struct SvdResult {
  Matrix u;                  // n x d, orthonormal columns
  std::vector<double> sigma; // d, descending
  Matrix v;                  // cols(M) x d
};

// Top-d singular triplets. Randomized path: Gaussian sketch with `oversample`
// extra columns and `power_iters` QR-stabilised power iterations. Signs are
// fixed so the largest-magnitude entry of each left vector is positive.
SvdResult truncated_svd_factors(const Matrix& m, int d, std::uint64_t seed,
                                SvdMethod method = SvdMethod::Auto, int oversample = 10,
                                int power_iters = 2);

FeatureMatrix truncated_svd(const Matrix& m, int d, std::uint64_t seed,
                            SvdMethod method = SvdMethod::Auto);

FeatureMatrix build_loworder_features(const Graph& g, const LowOrderParams& p, std::uint64_t seed);

// Throws InputError if any node has degree 0.
void require_positive_degrees(const Graph& g);

}  // namespace lnlm
