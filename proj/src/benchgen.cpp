#include "lnlm/benchgen.hpp"

#include <numeric>
#include <random>

namespace lnlm {

void SbmSpec::validate() const {
  if (block_sizes.empty()) throw InputError("SBM needs at least one block");
  for (std::size_t b : block_sizes)
    if (b == 0) throw InputError("SBM block sizes must be positive");
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
    throw InputError("SBM probabilities must lie in [0, 1]");
  if (std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0}) < 2)
    throw InputError("SBM needs at least two nodes");
}

std::pair<Graph, LabelSet> sbm_graph(const SbmSpec& spec) {
  spec.validate();
  std::vector<int> block;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
    block.insert(block.end(), spec.block_sizes[b], static_cast<int>(b));
  const std::size_t n = block.size();

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  std::vector<std::size_t> deg(n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = block[u] == block[v] ? spec.p_in : spec.p_out;
      if (coin(rng) < p) {
        edges.push_back({u, v, 1.0});
        ++deg[u];
        ++deg[v];
      }
    }

  std::vector<std::size_t> first(spec.block_sizes.size(), 0);
  for (std::size_t b = 1; b < first.size(); ++b) first[b] = first[b - 1] + spec.block_sizes[b - 1];
  for (std::size_t u = 0; u < n; ++u) {
    if (deg[u] > 0) continue;
    const auto b = static_cast<std::size_t>(block[u]);
    std::size_t v = u;
    if (spec.block_sizes[b] > 1) {
      std::uniform_int_distribution<std::size_t> pick(first[b], first[b] + spec.block_sizes[b] - 1);
      while (v == u) v = pick(rng);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      while (v == u) v = pick(rng);
    }
    edges.push_back({u, v, 1.0});
    ++deg[u];
    ++deg[v];
  }

  LabelSet labels = LabelSet::single(block);
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) labels.class_names.push_back(std::to_string(b));
  return {Graph::from_edges(n, edges), std::move(labels)};
}

namespace {

void add_clique(std::vector<Edge>& edges, std::size_t first, std::size_t size) {
  for (std::size_t u = first; u < first + size; ++u)
    for (std::size_t v = u + 1; v < first + size; ++v) edges.push_back({u, v, 1.0});
}

}  // namespace

std::map<std::string, Graph> toy_graphs() {
  std::map<std::string, Graph> out;
  {
    std::vector<Edge> e;
    add_clique(e, 0, 3);
    out.emplace("k3", Graph::from_edges(3, e));
  }
  {
    std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 1.0}};
    out.emplace("path3", Graph::from_edges(3, e));
  }
  {
    std::vector<Edge> e;
    for (std::size_t leaf = 1; leaf <= 4; ++leaf) e.push_back({0, leaf, 1.0});
    out.emplace("star5", Graph::from_edges(5, e));
  }
  {
    std::vector<Edge> e;
    add_clique(e, 0, 5);
    add_clique(e, 5, 5);
    e.push_back({4, 5, 1.0});
    out.emplace("two_cliques", Graph::from_edges(10, e));
  }
  {
    std::vector<Edge> e;
    add_clique(e, 0, 4);
    add_clique(e, 4, 4);
    e.push_back({3, 4, 1.0});
    out.emplace("barbell8", Graph::from_edges(8, e));
  }
  return out;
}

}  // namespace lnlm
