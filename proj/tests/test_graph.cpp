#include "lnlm/benchgen.hpp"
#include "lnlm/graph.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace lnlm;

namespace {

Graph parse(const std::string& text, bool weighted = false, LoadStats* st = nullptr) {
  std::istringstream in(text);
  return load_edge_list(in, weighted, st);
}

}  // namespace

TEST_CASE("load_edge_list: unweighted default") {
  Graph g = parse("0 1\n1 2\n");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  for (const Edge& e : g.edges()) CHECK(e.w == 1.0);
}

TEST_CASE("load_edge_list: duplicates merge by summing weights") {
  LoadStats st;
  Graph g = parse("0 1 2.5\n1 0 1.5\n", true, &st);
  CHECK(g.num_edges() == 1);
  CHECK(g.weight(0, 1) == 4.0);
  CHECK(g.weight(1, 0) == 4.0);
  CHECK(st.duplicates_merged == 1);
}

TEST_CASE("load_edge_list: sparse ids are remapped by first appearance") {
  Graph g = parse("5 9\n9 7\n");
  REQUIRE(g.num_nodes() == 3);
  CHECK(g.original_ids() == std::vector<NodeId>{5, 9, 7});
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("load_edge_list: comments, self-loops and unread weights") {
  LoadStats st;
  Graph g = parse("# header\n0 1 7\n\n1 1\n1 2\n", false, &st);
  CHECK(st.self_loops_dropped == 1);
  CHECK(g.num_edges() == 2);
  CHECK(g.weight(0, 1) == 1.0);
}

TEST_CASE("load_edge_list: errors") {
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("# only comments\n"), InputError);
  CHECK_THROWS_WITH_AS(parse("0 1\n1 x\n"), doctest::Contains("line 2"), InputError);
  CHECK_THROWS_AS(parse("0 1 -2\n", true), InputError);
  CHECK_THROWS_AS(parse("0 1 0\n", true), InputError);
  CHECK_THROWS_AS(parse("0 1 abc\n", true), InputError);
  CHECK_THROWS_AS(parse("0 1 1 1\n", true), InputError);
}

TEST_CASE("volume and degrees") {
  auto toys = toy_graphs();
  CHECK(volume(toys.at("k3")) == 6.0);
  CHECK(degrees(toys.at("k3")) == std::vector<double>{2, 2, 2});
  CHECK(degrees(toys.at("star5")) == std::vector<double>{4, 1, 1, 1, 1});

  std::vector<Edge> one{{0, 1, 2.0}};
  CHECK(volume(Graph::from_edges(2, one)) == 4.0);

  Graph empty = Graph::from_edges(4, {});
  CHECK(volume(empty) == 0.0);

  std::vector<Edge> with_isolated{{0, 1, 1.0}};
  CHECK(degrees(Graph::from_edges(3, with_isolated))[2] == 0.0);
}

TEST_CASE("connected_components") {
  std::vector<Edge> tri2{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}};
  auto comps = connected_components(Graph::from_edges(6, tri2));
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].size() == 3);
  CHECK(comps[1].size() == 3);

  auto path = connected_components(toy_graphs().at("path3"));
  REQUIRE(path.size() == 1);
  CHECK(path[0] == std::vector<std::size_t>{0, 1, 2});

  CHECK(connected_components(Graph::from_edges(1, {})).size() == 1);
}

TEST_CASE("largest_component keeps original ids") {
  Graph g = parse("10 11\n11 12\n12 10\n20 21\n");
  Graph lcc = largest_component(g);
  CHECK(lcc.num_nodes() == 3);
  CHECK(lcc.original_ids() == std::vector<NodeId>{10, 11, 12});
}

TEST_CASE("remove_edges_keep_connected: floor rule and tree-only graphs") {
  auto toys = toy_graphs();
  EdgeSplit k3 = remove_edges_keep_connected(toys.at("k3"), 0.3, 1);
  CHECK(k3.target == 0);
  CHECK(k3.held_out.empty());
  CHECK(k3.shortfall);

  EdgeSplit path = remove_edges_keep_connected(toys.at("path3"), 0.2, 1);
  CHECK(path.held_out.empty());
  CHECK(path.achieved_fraction == 0.0);

  EdgeSplit k3_big = remove_edges_keep_connected(toys.at("k3"), 0.5, 1);
  CHECK(k3_big.held_out.size() == 1);
  CHECK(connected_components(k3_big.train).size() == 1);
}

TEST_CASE("remove_edges_keep_connected: errors") {
  std::vector<Edge> split{{0, 1, 1}, {2, 3, 1}};
  CHECK_THROWS_AS(remove_edges_keep_connected(Graph::from_edges(4, split), 0.1, 1), InputError);
  auto k3 = toy_graphs().at("k3");
  CHECK_THROWS_AS(remove_edges_keep_connected(k3, 0.0, 1), InputError);
  CHECK_THROWS_AS(remove_edges_keep_connected(k3, 1.0, 1), InputError);
}

TEST_CASE("remove_edges_keep_connected on an SBM graph") {
  auto [g, labels] = sbm_graph({{100, 100}, 0.14, 0.0045, 3});
  REQUIRE(connected_components(g).size() == 1);
  const std::size_t m = g.num_edges();
  CHECK(m > 1300);
  CHECK(m < 1700);
  EdgeSplit s = remove_edges_keep_connected(g, 0.1, 42);
  CHECK(s.held_out.size() == m / 10);
  CHECK(connected_components(s.train).size() == 1);
  CHECK(s.train.num_edges() + s.held_out.size() == m);
  for (auto [u, v] : s.held_out) {
    CHECK(g.has_edge(u, v));
    CHECK_FALSE(s.train.has_edge(u, v));
  }
  EdgeSplit again = remove_edges_keep_connected(g, 0.1, 42);
  CHECK(again.held_out == s.held_out);
}

TEST_CASE("property: random graphs satisfy the graph invariants") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<Edge> edges;
    std::uniform_real_distribution<double> w(0.1, 3.0);
    for (int e = 0; e < static_cast<int>(n * 2); ++e) {
      std::size_t u = rng() % n, v = rng() % n;
      if (u != v) edges.push_back({u, v, w(rng)});
    }
    Graph g = Graph::from_edges(n, edges);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) CHECK(g.weight(u, v) == g.weight(v, u));
    double sum = 0;
    for (double d : degrees(g)) sum += d;
    CHECK(sum == doctest::Approx(volume(g)).epsilon(1e-12));

    if (connected_components(g).size() == 1 && g.num_edges() >= 2) {
      EdgeSplit s = remove_edges_keep_connected(g, 0.4, rng());
      CHECK(connected_components(s.train).size() == 1);
    }

    // save -> load -> save is byte-identical
    if (g.num_edges() > 0) {
      Graph lcc = largest_component(g);
      std::ostringstream a;
      save_edge_list(a, lcc);
      std::istringstream ia(a.str());
      Graph back = load_edge_list(ia, true);
      std::ostringstream b;
      save_edge_list(b, back);
      CHECK(a.str() == b.str());
      CHECK(back.adjacency().values == lcc.adjacency().values);
    }
  }
}

TEST_CASE("id map sidecar") {
  Graph g = parse("5 9\n9 7\n");
  std::ostringstream out;
  save_id_map(out, g);
  CHECK(out.str() == "0 5\n1 9\n2 7\n");
}
