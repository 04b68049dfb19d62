#include "lnlm/benchgen.hpp"

#include <doctest.h>

#include <cmath>

using namespace lnlm;

namespace {

double modularity(const Graph& g, const std::vector<int>& block) {
  const double two_m = volume(g);
  const auto deg = degrees(g);
  double q = 0.0;
  for (const auto& e : g.edges())
    if (block[e.u] == block[e.v]) q += 2.0 * e.w / two_m;
  std::vector<double> block_deg(8, 0.0);
  for (std::size_t i = 0; i < deg.size(); ++i) block_deg[static_cast<std::size_t>(block[i])] += deg[i];
  for (double d : block_deg) q -= (d / two_m) * (d / two_m);
  return q;
}

}  // namespace

TEST_CASE("sbm: complete blocks without cross edges give disjoint triangles") {
  auto [g, labels] = sbm_graph({{3, 3}, 1.0, 0.0, 1});
  CHECK(g.num_nodes() == 6);
  CHECK(g.num_edges() == 6);
  for (const auto& e : g.edges()) CHECK(labels.primary()[e.u] == labels.primary()[e.v]);
  CHECK(connected_components(g).size() == 2);
  CHECK(labels.primary() == std::vector<int>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("sbm: intra-block density within three sigma") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [g, labels] = sbm_graph({{60, 60}, 0.5, 0.05, seed});
    const auto block = labels.primary();
    double intra = 0, inter = 0;
    for (const auto& e : g.edges()) (block[e.u] == block[e.v] ? intra : inter) += 1;
    const double pairs_in = 2 * 60.0 * 59 / 2, pairs_out = 60.0 * 60;
    CHECK(std::abs(intra / pairs_in - 0.5) <= 3 * std::sqrt(0.25 / pairs_in));
    CHECK(std::abs(inter / pairs_out - 0.05) <= 3 * std::sqrt(0.05 * 0.95 / pairs_out));
  }
}

TEST_CASE("sbm: equal probabilities give a label-blind partition") {
  // Null expectation: the intra-block share of node pairs minus the degree term (1/2).
  const double expect = 2.0 * (50.0 * 49 / 2) / (100.0 * 99 / 2) - 0.5;
  const int runs = 100;
  double sum = 0.0, edges = 0.0;
  for (std::uint64_t seed = 1; seed <= runs; ++seed) {
    auto [g, labels] = sbm_graph({{50, 50}, 0.1, 0.1, seed});
    const double q = modularity(g, labels.primary());
    CHECK(std::abs(q) < 0.1);
    sum += q;
    edges += static_cast<double>(g.num_edges());
  }
  const double sigma = std::sqrt(0.25 / (edges / runs)) / std::sqrt(double(runs));
  CHECK(std::abs(sum / runs - expect) < 3 * sigma);

  auto [planted, pl] = sbm_graph({{50, 50}, 0.3, 0.01, 1});
  CHECK(modularity(planted, pl.primary()) > 0.4);
}

TEST_CASE("sbm: deterministic, no isolated nodes, graph invariants hold") {
  auto [a, la] = sbm_graph({{10, 15, 5}, 0.05, 0.0, 9});
  auto [b, lb] = sbm_graph({{10, 15, 5}, 0.05, 0.0, 9});
  CHECK(a == b);
  CHECK(la.labels == lb.labels);
  CHECK(la.num_classes == 3);
  const auto deg = degrees(a);
  for (std::size_t i = 0; i < deg.size(); ++i) CHECK(deg[i] > 0.0);
  double sum = 0.0;
  for (double d : deg) sum += d;
  CHECK(sum == volume(a));
  for (const auto& e : a.edges()) {
    CHECK(e.u != e.v);
    CHECK(la.primary()[e.u] == la.primary()[e.v]);  // p_out = 0, so rewiring stays in-block
  }
}

TEST_CASE("sbm: invalid specs") {
  CHECK_THROWS_AS(sbm_graph({{}, 0.5, 0.1, 1}), InputError);
  CHECK_THROWS_AS(sbm_graph({{3, 0}, 0.5, 0.1, 1}), InputError);
  CHECK_THROWS_AS(sbm_graph({{3, 3}, 1.5, 0.1, 1}), InputError);
  CHECK_THROWS_AS(sbm_graph({{3, 3}, 0.5, -0.1, 1}), InputError);
}

TEST_CASE("toy fixtures") {
  auto toys = toy_graphs();
  CHECK(volume(toys.at("k3")) == 6.0);
  CHECK(toys.at("path3").num_edges() == 2);
  CHECK(toys.at("star5").num_nodes() == 5);
  CHECK(toys.at("star5").num_edges() == 4);
  CHECK(toys.at("two_cliques").num_edges() == 21);
  CHECK(toys.at("two_cliques").num_nodes() == 10);
  CHECK(connected_components(toys.at("barbell8")).size() == 1);
  CHECK(toys.at("barbell8").num_nodes() == 8);
  for (const auto& [name, g] : toys) CHECK_MESSAGE(connected_components(g).size() == 1, name);
}
