#pragma once

#include "lnlm/common.hpp"
#include "lnlm/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace lnlm {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 1.0;
};

// Undirected simple graph with positive weights. Adjacency is a symmetric CSR
// matrix; ids are dense 0..n-1 and `original_ids()` maps them back to the ids
// used in the source file. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Builds from undirected edges (either orientation). Duplicates are merged
  // by summing weights. Self-loops and non-positive weights are rejected;
  // the loader filters self-loops before calling this.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          std::vector<NodeId> original_ids = {});

  std::size_t num_nodes() const { return adj_.rows; }
  std::size_t num_edges() const { return adj_.nnz() / 2; }

  const CsrMatrix& adjacency() const { return adj_; }
  const std::vector<NodeId>& original_ids() const { return ids_; }

  std::span<const std::size_t> neighbors(std::size_t u) const;
  std::span<const double> neighbor_weights(std::size_t u) const;

  // 0 when there is no edge.
  double weight(std::size_t u, std::size_t v) const;
  bool has_edge(std::size_t u, std::size_t v) const { return weight(u, v) > 0.0; }

  // Each undirected edge once, with u < v, sorted.
  std::vector<Edge> edges() const;

  bool is_weighted() const;

  // Subgraph induced by `nodes` (kept in the given order), original ids preserved.
  Graph induced(std::span<const std::size_t> nodes) const;

  friend bool operator==(const Graph&, const Graph&);

 private:
  CsrMatrix adj_;
  std::vector<NodeId> ids_;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_merged = 0;
};

// Reads `u v [w]` lines; `#` lines and blank lines are skipped. If the ids are
// exactly 0..n-1 they are kept, otherwise they are remapped to 0..n-1 in
// order of first appearance. The weight column is only read when `weighted`.
Graph load_edge_list(std::istream& in, bool weighted, LoadStats* stats = nullptr);

// Canonical format: internal ids, one `u v` (or `u v w` for weighted graphs)
// line per edge with u < v, weights printed with 17 significant digits.
void save_edge_list(std::ostream& out, const Graph& g);

// Two columns: internal id, original id.
void save_id_map(std::ostream& out, const Graph& g);

// Sum of all adjacency entries (twice the total edge weight).
double volume(const Graph& g);

std::vector<double> degrees(const Graph& g);

// Components sorted by smallest member; members sorted.
std::vector<std::vector<std::size_t>> connected_components(const Graph& g);

// Largest component (ties go to the one with the smallest member).
Graph largest_component(const Graph& g);

struct EdgeSplit {
  Graph train;
  std::vector<std::pair<std::size_t, std::size_t>> held_out;
  double fraction = 0.0;           // requested
  std::size_t target = 0;          // floor(fraction * |E|)
  double achieved_fraction = 0.0;  // held_out.size() / |E|
  bool shortfall = false;          // fewer than `target` edges could be removed, or target was 0
};

// Holds out floor(fraction * |E|) edges chosen uniformly among the edges not
// on a random spanning tree, so the training graph stays connected.
EdgeSplit remove_edges_keep_connected(const Graph& g, double fraction, std::uint64_t seed);

// FNV-1a over the CSR arrays; used to key on-disk caches.
std::uint64_t graph_hash(const Graph& g);

}  // namespace lnlm
