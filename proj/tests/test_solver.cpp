#include "lnlm/benchgen.hpp"
#include "lnlm/eval.hpp"
#include "lnlm/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace lnlm;

namespace {

Matrix uniform(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

struct Instance {
  Graph g;
  Matrix a;
  Matrix b;
  Factors f;
};

Instance random_instance(std::size_t n, int m, int k, int d, std::mt19937_64& rng) {
  Instance in;
  in.g = oracle::random_connected_graph(n, 0.3, rng);
  in.a = oracle::dense_adjacency(in.g);
  in.b = uniform(static_cast<Eigen::Index>(n), d, rng, -1.0, 1.0);
  in.f = init_factors(n, m, k, d, rng());
  return in;
}

double v_objective(const Matrix& b, const Factors& f, double alpha, double beta) {
  return alpha * (f.z - f.v * f.u).squaredNorm() + beta * (f.v * f.h - b).squaredNorm();
}
double h_objective(const Matrix& b, const Factors& f, double beta, double gamma) {
  return beta * (f.v * f.h - b).squaredNorm() + gamma * f.h.squaredNorm();
}
double u_objective(const Factors& f, double alpha, double gamma) {
  return alpha * (f.z - f.v * f.u).squaredNorm() + gamma * f.u.squaredNorm();
}
double z_objective(const Matrix& a, const Factors& f, double alpha) {
  return (a - f.z * f.z.transpose()).squaredNorm() + alpha * (f.z - f.v * f.u).squaredNorm();
}

}  // namespace

TEST_CASE("init_factors") {
  Factors a = init_factors(3, 2, 2, 2, 42), b = init_factors(3, 2, 2, 2, 42);
  CHECK(a.z == b.z);
  CHECK(a.v == b.v);
  CHECK(a.u == b.u);
  CHECK(a.h == b.h);
  CHECK(a.z.rows() == 3);
  CHECK(a.z.cols() == 2);
  CHECK(a.v.rows() == 3);
  CHECK(a.v.cols() == 2);
  CHECK(a.u.rows() == 2);
  CHECK(a.u.cols() == 2);
  CHECK(a.h.rows() == 2);
  CHECK(a.h.cols() == 2);

  Factors big = init_factors(200, 50, 40, 30, 7);
  for (const Matrix* x : {&big.z, &big.v, &big.u, &big.h}) {
    CHECK(x->minCoeff() >= kInitLow);
    CHECK(x->maxCoeff() <= 1.0);
  }
  CHECK(init_factors(3, 2, 2, 2, 43).z != a.z);
  CHECK_THROWS_AS(init_factors(0, 2, 2, 2, 1), InputError);
}

TEST_CASE("loss examples") {
  LnlmHyperParams h;
  h.m = h.k = 2;
  Factors zero{Matrix::Zero(3, 2), Matrix::Zero(3, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  CsrMatrix empty = CsrMatrix::from_dense(Matrix::Zero(3, 3));
  CHECK(loss(empty, Matrix::Zero(3, 2), zero, h) == 0.0);

  // every residual vanishes, gamma = 0 (loss itself does not validate)
  std::mt19937_64 rng(5);
  Factors f{Matrix(), uniform(3, 2, rng), uniform(2, 2, rng), uniform(2, 2, rng)};
  f.z = f.v * f.u;
  const Matrix a = f.z * f.z.transpose();
  const Matrix b = f.v * f.h;
  h.gamma = 0.0;
  CHECK(loss(CsrMatrix::from_dense(a), b, f, h) < 1e-20);

  CHECK_THROWS_AS(loss(empty, Matrix::Zero(4, 2), zero, h), InputError);
}

TEST_CASE("property: loss equals the element-wise oracle") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 5 + rng() % 16;
    Instance in = random_instance(n, 3, 2, 4, rng);
    LnlmHyperParams h;
    h.alpha = 0.5 + rng() % 100;
    h.beta = 0.5 + rng() % 50;
    h.gamma = 0.5 + rng() % 30;
    const double got = loss(in.g.adjacency(), in.b, in.f, h);
    const double want = oracle::loss(in.a, in.b, in.f.z, in.f.v, in.f.u, in.f.h, h.alpha, h.beta, h.gamma);
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, want));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("property: updates match the hand-coded oracle formulas") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + rng() % 5;
    Instance in = random_instance(n, 3, 3, 4, rng);
    const double alpha = 1 + rng() % 60, beta = 1 + rng() % 30, gamma = 1 + rng() % 30;
    CHECK(oracle::max_rel_diff(update_z(in.g.adjacency(), in.f, alpha),
                               oracle::update_z(in.a, in.f.z, in.f.v, in.f.u, alpha)) < 1e-10);
    CHECK(oracle::max_rel_diff(update_v(in.b, in.f, alpha, beta),
                               oracle::update_v(in.b, in.f.z, in.f.v, in.f.u, in.f.h, alpha, beta)) < 1e-10);
    CHECK(oracle::max_rel_diff(update_h(in.b, in.f, beta, gamma),
                               oracle::update_h(in.b, in.f.v, in.f.h, beta, gamma)) < 1e-10);
    CHECK(oracle::max_rel_diff(update_u(in.f, alpha, gamma),
                               oracle::update_u(in.f.z, in.f.v, in.f.u, alpha, gamma)) < 1e-10);
  }
}

TEST_CASE("update_z: stationary point is a fixed point") {
  std::mt19937_64 rng(3);
  const std::size_t n = 6;
  Graph g = oracle::random_connected_graph(n, 0.4, rng);
  const Matrix a = oracle::dense_adjacency(g);
  const double alpha = 1000.0;
  Factors f;
  f.z = uniform(6, 3, rng, 0.1, 1.0);
  f.v = Matrix::Identity(6, 6);
  // V U = Z + (2/alpha)(Z Z^T Z - A Z) balances numerator and denominator
  f.u = f.z + (2.0 / alpha) * (f.z * f.z.transpose() * f.z - a * f.z);
  REQUIRE(f.u.minCoeff() > 0.0);
  f.h = Matrix::Ones(6, 1);
  CHECK(oracle::max_abs_diff(update_z(g.adjacency(), f, alpha), f.z) < 1e-8);
}

TEST_CASE("update_z: zero entries stay zero") {
  std::mt19937_64 rng(4);
  Instance in = random_instance(6, 3, 2, 2, rng);
  in.f.z(2, 1) = 0.0;
  in.f.z(4, 0) = 0.0;
  Matrix z = update_z(in.g.adjacency(), in.f, 10.0);
  CHECK(z(2, 1) == 0.0);
  CHECK(z(4, 0) == 0.0);
}

TEST_CASE("update_v/h/u fixed points at an exact fit") {
  std::mt19937_64 rng(6);
  Factors f;
  f.v = uniform(6, 3, rng, 0.1, 1.0);
  f.u = uniform(3, 4, rng, 0.1, 1.0);
  f.h = uniform(3, 2, rng, 0.1, 1.0);
  f.z = f.v * f.u;
  const Matrix b = f.v * f.h;
  CHECK(oracle::max_abs_diff(update_v(b, f, 3.0, 2.0), f.v) < 1e-8);
  CHECK(oracle::max_abs_diff(update_h(b, f, 2.0, 0.0), f.h) < 1e-8);
  CHECK(oracle::max_abs_diff(update_u(f, 3.0, 0.0), f.u) < 1e-8);
}

TEST_CASE("update_v with beta = 0 is the classical NMF rule") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    Instance in = random_instance(8, 5, 3, 2, rng);
    Matrix expect = in.f.v;
    const Matrix num = in.f.z * in.f.u.transpose();
    const Matrix den = in.f.v * in.f.u * in.f.u.transpose();
    for (Eigen::Index i = 0; i < expect.rows(); ++i)
      for (Eigen::Index j = 0; j < expect.cols(); ++j) expect(i, j) *= num(i, j) / den(i, j);
    CHECK(oracle::max_rel_diff(update_v(in.b, in.f, 4.0, 0.0), expect) < 1e-10);
  }
}

TEST_CASE("large gamma shrinks H and U") {
  std::mt19937_64 rng(9);
  Instance in = random_instance(8, 4, 3, 3, rng);
  const Matrix h = update_h(in.b, in.f, 1.0, 1e9);
  const Matrix u = update_u(in.f, 1.0, 1e9);
  for (Eigen::Index i = 0; i < h.size(); ++i) CHECK(h.data()[i] < in.f.h.data()[i]);
  for (Eigen::Index i = 0; i < u.size(); ++i) CHECK(u.data()[i] < in.f.u.data()[i]);
  CHECK(h.maxCoeff() < 1e-6);
  CHECK(u.maxCoeff() < 1e-6);
}

TEST_CASE("property: V, H and U subproblem objectives never increase") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    Instance in = random_instance(6, 3, 3, 4, rng);
    const double alpha = 1 + rng() % 60, beta = 1 + rng() % 30, gamma = 1 + rng() % 30;
    Factors f = in.f;
    for (int s = 0; s < 50; ++s) {
      const double before_v = v_objective(in.b, f, alpha, beta);
      f.v = update_v(in.b, f, alpha, beta);
      CHECK(v_objective(in.b, f, alpha, beta) <= before_v * (1 + 1e-12) + 1e-12);
      const double before_h = h_objective(in.b, f, beta, gamma);
      f.h = update_h(in.b, f, beta, gamma);
      CHECK(h_objective(in.b, f, beta, gamma) <= before_h * (1 + 1e-12) + 1e-12);
      const double before_u = u_objective(f, alpha, gamma);
      f.u = update_u(f, alpha, gamma);
      CHECK(u_objective(f, alpha, gamma) <= before_u * (1 + 1e-12) + 1e-12);
      CHECK(f.v.minCoeff() >= 0.0);
      CHECK(f.h.minCoeff() >= 0.0);
      CHECK(f.u.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("property: a plain Z step from a random start does not raise the Z subproblem") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 5 + rng() % 20;
    Instance in = random_instance(n, 1 + int(rng() % 4), 1 + int(rng() % 3), 2, rng);
    const double alpha = 1 + rng() % 100;
    const double before = z_objective(in.a, in.f, alpha);
    in.f.z = update_z(in.g.adjacency(), in.f, alpha);
    CHECK(z_objective(in.a, in.f, alpha) <= before * (1 + 1e-12));
    CHECK(in.f.z.minCoeff() >= 0.0);
  }
}

// Measured: the residual rises after one step for roughly 5% of random starts.
TEST_CASE("property: a single Z step does not raise the Z KKT residual" * doctest::may_fail()) {
  int rises = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 5 + rng() % 20;
    Instance in = random_instance(n, 1 + int(rng() % 4), 1 + int(rng() % 3), 2, rng);
    LnlmHyperParams h;
    h.alpha = 1 + rng() % 100;
    const double before = kkt_residual_parts(in.g.adjacency(), in.b, in.f, h).z;
    in.f.z = update_z(in.g.adjacency(), in.f, h.alpha);
    rises += kkt_residual_parts(in.g.adjacency(), in.b, in.f, h).z > before;
  }
  MESSAGE("Z residual rose on " << rises << " / 300 starts");
  CHECK(rises == 0);
}

TEST_CASE("kkt_residual") {
  LnlmHyperParams h;
  Factors zero{Matrix::Zero(3, 2), Matrix::Zero(3, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  Graph k3 = toy_graphs().at("k3");
  std::mt19937_64 rng(1);
  CHECK(kkt_residual(k3.adjacency(), uniform(3, 2, rng, -1, 1), zero, h) == 0.0);
}

namespace {

Graph disjoint_cliques() {
  std::vector<Edge> edges;
  for (std::size_t off : {0u, 5u})
    for (std::size_t u = 0; u < 5; ++u)
      for (std::size_t v = u + 1; v < 5; ++v) edges.push_back({off + u, off + v, 1.0});
  return Graph::from_edges(10, edges);
}

LnlmHyperParams clique_params() {
  LnlmHyperParams h;
  h.alpha = h.beta = h.gamma = 1.0;
  h.k = 2;
  h.m = 4;
  h.delta = 1e-6;
  return h;
}

}  // namespace

TEST_CASE("fit: two disjoint 5-cliques are recovered") {
  Graph g = disjoint_cliques();
  FeatureMatrix feats = build_loworder_features(g, {2, 1.0, 4}, 1);
  LnlmHyperParams h = clique_params();
  h.max_iter = 5000;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    h.seed = seed;
    EmbeddingModel model = fit(g, feats, h);
    CHECK(model.converged);
    KMeansResult km = kmeans(model.factors.v, 2, 10, 1);
    std::vector<int> truth{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(nmi(km.labels, truth) == doctest::Approx(1.0));
  }
}

// Measured: about 895 sweeps are needed at delta = 1e-6.
TEST_CASE("fit: two disjoint 5-cliques converge within 500 sweeps" * doctest::may_fail()) {
  Graph g = disjoint_cliques();
  FeatureMatrix feats = build_loworder_features(g, {2, 1.0, 4}, 1);
  LnlmHyperParams h = clique_params();
  h.max_iter = 500;
  EmbeddingModel model = fit(g, feats, h);
  CHECK(model.converged);
}

TEST_CASE("fit: stopping rules") {
  Graph g = toy_graphs().at("two_cliques");
  FeatureMatrix feats = build_loworder_features(g, {2, 1.0, 4}, 1);
  LnlmHyperParams h;
  h.k = 3;
  h.m = 4;

  h.delta = 1e30;
  EmbeddingModel one = fit(g, feats, h);
  CHECK(one.converged);
  CHECK(one.iterations_run == 1);
  CHECK(one.loss_trace.size() == 2);

  h.max_iter = 0;
  EmbeddingModel none = fit(g, feats, h);
  CHECK_FALSE(none.converged);
  CHECK(none.iterations_run == 0);
  Factors init = init_factors(10, 4, 3, 4, h.seed);
  CHECK(none.factors.v == init.v);
  CHECK(none.factors.z == init.z);

  h.k = 11;
  CHECK_THROWS_AS(fit(g, feats, h), InputError);
  h.k = 3;
  h.alpha = 0.0;
  CHECK_THROWS_AS(fit(g, feats, h), InputError);
}

TEST_CASE("fit: converged run drives the KKT residual down") {
  Graph g = toy_graphs().at("two_cliques");
  FeatureMatrix feats = build_loworder_features(g, {2, 1.0, 4}, 1);
  LnlmHyperParams h;
  h.alpha = h.beta = h.gamma = 1.0;
  h.k = 2;
  h.m = 4;
  h.delta = 1e-13;
  h.max_iter = 100000;
  const double initial = kkt_residual(g.adjacency(), feats.b, init_factors(10, 4, 2, 4, h.seed), h);
  EmbeddingModel model = fit(g, feats, h);
  CHECK(kkt_residual(g.adjacency(), feats.b, model.factors, h) < 1e-3 * initial);
}

TEST_CASE("property: fit loss is monotone and factors stay non-negative") {
  int backtracked = 0;
  for (std::size_t n : {5u, 10u, 20u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed * 31 + n);
      Graph g = oracle::random_connected_graph(n, 0.3, rng);
      FeatureMatrix feats = build_loworder_features(g, {1 + int(seed % 3), 1.0, int(std::min<std::size_t>(n, 4))}, seed);
      LnlmHyperParams h;
      h.k = static_cast<int>(std::min<std::size_t>(n, 3));
      h.m = static_cast<int>(std::min<std::size_t>(n, 4));
      h.seed = seed;
      h.max_iter = 200;
      h.delta = 1e-8;
      EmbeddingModel model;
      REQUIRE_NOTHROW(model = fit(g, feats, h));
      for (std::size_t i = 1; i < model.loss_trace.size(); ++i)
        CHECK(model.loss_trace[i].second <= model.loss_trace[i - 1].second + 1e-9);
      for (const Matrix* x : {&model.factors.z, &model.factors.v, &model.factors.u, &model.factors.h})
        CHECK(x->minCoeff() >= 0.0);
      backtracked += model.z_backtracks > 0;
    }
  }
  MESSAGE("runs with a damped Z step: " << backtracked << " / 300");
}

TEST_CASE("fit is deterministic") {
  Graph g = toy_graphs().at("barbell8");
  FeatureMatrix feats = build_loworder_features(g, {3, 1.0, 4}, 2);
  LnlmHyperParams h;
  h.k = 2;
  h.m = 4;
  h.seed = 77;
  EmbeddingModel a = fit(g, feats, h), b = fit(g, feats, h);
  CHECK(a.loss_trace == b.loss_trace);
  CHECK(a.factors.v == b.factors.v);
}

TEST_CASE("fit trace agrees with loss() on the returned factors") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 10; ++t) {
    Graph g = oracle::random_connected_graph(12 + rng() % 20, 0.2, rng);
    FeatureMatrix feats = build_loworder_features(g, {3, 1.0, 5}, t);
    LnlmHyperParams h;
    h.k = 4;
    h.m = 6;
    h.seed = rng();
    h.max_iter = 1 + static_cast<int>(rng() % 60);
    EmbeddingModel model = fit(g, feats, h);
    const double direct = loss(g.adjacency(), feats.b, model.factors, h);
    CHECK(std::abs(model.loss_trace.back().second - direct) <= 1e-10 * direct);
  }
}
