#include "lnlm/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

namespace lnlm {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges,
                        std::vector<NodeId> original_ids) {
  // Merge duplicates on the (min, max) orientation first so both directions
  // receive the identical summed weight.
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop on node " + std::to_string(e.u));
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw InputError("edge weight must be positive and finite");
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
  }
  auto by_endpoints = [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  };
  std::stable_sort(canon.begin(), canon.end(), by_endpoints);
  std::vector<Edge> directed;
  directed.reserve(canon.size() * 2);
  for (std::size_t i = 0; i < canon.size();) {
    std::size_t j = i;
    double w = 0.0;
    while (j < canon.size() && canon[j].u == canon[i].u && canon[j].v == canon[i].v) w += canon[j++].w;
    directed.push_back({canon[i].u, canon[i].v, w});
    directed.push_back({canon[i].v, canon[i].u, w});
    i = j;
  }
  std::sort(directed.begin(), directed.end(), by_endpoints);

  Graph g;
  g.adj_.rows = n;
  g.adj_.cols = n;
  g.adj_.row_ptr.assign(n + 1, 0);
  for (const Edge& e : directed) {
    g.adj_.col_idx.push_back(e.v);
    g.adj_.values.push_back(e.w);
    ++g.adj_.row_ptr[e.u + 1];
  }
  std::partial_sum(g.adj_.row_ptr.begin(), g.adj_.row_ptr.end(), g.adj_.row_ptr.begin());

  if (original_ids.empty()) {
    original_ids.resize(n);
    std::iota(original_ids.begin(), original_ids.end(), NodeId{0});
  }
  if (original_ids.size() != n) throw InputError("id map size does not match node count");
  g.ids_ = std::move(original_ids);
  return g;
}

std::span<const std::size_t> Graph::neighbors(std::size_t u) const {
  return {adj_.col_idx.data() + adj_.row_ptr[u], adj_.row_ptr[u + 1] - adj_.row_ptr[u]};
}

std::span<const double> Graph::neighbor_weights(std::size_t u) const {
  return {adj_.values.data() + adj_.row_ptr[u], adj_.row_ptr[u + 1] - adj_.row_ptr[u]};
}

double Graph::weight(std::size_t u, std::size_t v) const {
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return 0.0;
  return adj_.values[adj_.row_ptr[u] + static_cast<std::size_t>(it - nb.begin())];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t u = 0; u < num_nodes(); ++u) {
    auto nb = neighbors(u);
    auto wt = neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (nb[k] > u) out.push_back({u, nb[k], wt[k]});
  }
  return out;
}

bool Graph::is_weighted() const {
  return std::any_of(adj_.values.begin(), adj_.values.end(), [](double w) { return w != 1.0; });
}

Graph Graph::induced(std::span<const std::size_t> nodes) const {
  std::vector<std::size_t> local(num_nodes(), num_nodes());
  std::vector<NodeId> ids;
  ids.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    local[nodes[i]] = i;
    ids.push_back(ids_[nodes[i]]);
  }
  std::vector<Edge> kept;
  for (const Edge& e : edges())
    if (local[e.u] < num_nodes() && local[e.v] < num_nodes())
      kept.push_back({local[e.u], local[e.v], e.w});
  return from_edges(nodes.size(), kept, std::move(ids));
}

bool operator==(const Graph& a, const Graph& b) {
  return a.adj_.rows == b.adj_.rows && a.adj_.row_ptr == b.adj_.row_ptr &&
         a.adj_.col_idx == b.adj_.col_idx && a.adj_.values == b.adj_.values && a.ids_ == b.ids_;
}

namespace {

std::string line_error(std::size_t line_no, const std::string& what) {
  return "edge list line " + std::to_string(line_no) + ": " + what;
}

bool parse_id(const std::string& tok, NodeId& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

Graph load_edge_list(std::istream& in, bool weighted, LoadStats* stats) {
  struct RawEdge {
    NodeId u, v;
    double w;
  };
  std::vector<RawEdge> raw;
  std::vector<NodeId> order;  // first appearance
  std::unordered_map<NodeId, std::size_t> seen;
  LoadStats st;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string tu, tv, tw, extra;
    ls >> tu >> tv;
    NodeId u = 0, v = 0;
    if (!parse_id(tu, u) || !parse_id(tv, v))
      throw InputError(line_error(line_no, "expected two integer node ids"));
    double w = 1.0;
    if (ls >> tw) {
      if (weighted) {
        try {
          std::size_t used = 0;
          w = std::stod(tw, &used);
          if (used != tw.size()) throw std::invalid_argument(tw);
        } catch (const std::exception&) {
          throw InputError(line_error(line_no, "malformed weight '" + tw + "'"));
        }
        if (!(w > 0.0) || !std::isfinite(w))
          throw InputError(line_error(line_no, "weight must be positive"));
      }
      if (ls >> extra) throw InputError(line_error(line_no, "too many fields"));
    }
    ++st.lines;
    for (NodeId id : {u, v})
      if (seen.emplace(id, order.size()).second) order.push_back(id);
    if (u == v) {
      ++st.self_loops_dropped;
      continue;
    }
    raw.push_back({u, v, w});
  }
  if (st.lines == 0) throw InputError("edge list is empty");

  const std::size_t n = order.size();
  bool dense = true;
  for (NodeId id : order)
    if (id < 0 || static_cast<std::size_t>(id) >= n) dense = false;

  std::vector<NodeId> ids(n);
  auto index = [&](NodeId id) { return dense ? static_cast<std::size_t>(id) : seen.at(id); };
  for (std::size_t i = 0; i < n; ++i) ids[index(order[i])] = order[i];

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const RawEdge& r : raw) edges.push_back({index(r.u), index(r.v), r.w});
  Graph g = Graph::from_edges(n, edges, std::move(ids));
  st.duplicates_merged = raw.size() - g.num_edges();
  if (stats) *stats = st;
  return g;
}

void save_edge_list(std::ostream& out, const Graph& g) {
  const bool weighted = g.is_weighted();
  char buf[64];
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (weighted) {
      std::snprintf(buf, sizeof buf, " %.17g", e.w);
      out << buf;
    }
    out << '\n';
  }
}

void save_id_map(std::ostream& out, const Graph& g) {
  for (std::size_t i = 0; i < g.num_nodes(); ++i) out << i << ' ' << g.original_ids()[i] << '\n';
}

double volume(const Graph& g) {
  double s = 0.0;
  for (double w : g.adjacency().values) s += w;
  return s;
}

std::vector<double> degrees(const Graph& g) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (std::size_t u = 0; u < g.num_nodes(); ++u)
    for (double w : g.neighbor_weights(u)) d[u] += w;
  return d;
}

std::vector<std::vector<std::size_t>> connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<bool> visited(n, false);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (visited[s]) continue;
    std::vector<std::size_t> comp;
    visited[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (std::size_t v : g.neighbors(u))
        if (!visited[v]) {
          visited[v] = true;
          stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

Graph largest_component(const Graph& g) {
  auto comps = connected_components(g);
  if (comps.empty()) return g;
  auto best = std::max_element(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
    return a.size() < b.size();
  });
  return g.induced(*best);
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

EdgeSplit remove_edges_keep_connected(const Graph& g, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InputError("edge removal fraction must lie in (0, 1)");
  if (connected_components(g).size() > 1)
    throw InputError("edge removal requires a connected graph");

  std::mt19937_64 rng(seed);
  std::vector<Edge> all = g.edges();
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  // Random spanning tree: Kruskal over a shuffled edge order.
  DisjointSets ds(g.num_nodes());
  std::vector<bool> on_tree(all.size(), false);
  for (std::size_t idx : order) on_tree[idx] = ds.unite(all[idx].u, all[idx].v);

  std::vector<std::size_t> removable;
  for (std::size_t idx = 0; idx < all.size(); ++idx)
    if (!on_tree[idx]) removable.push_back(idx);
  std::shuffle(removable.begin(), removable.end(), rng);

  EdgeSplit split;
  split.fraction = fraction;
  split.target = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(all.size())));
  const std::size_t take = std::min(split.target, removable.size());
  std::vector<bool> held(all.size(), false);
  for (std::size_t i = 0; i < take; ++i) held[removable[i]] = true;

  std::vector<Edge> kept;
  for (std::size_t idx = 0; idx < all.size(); ++idx) {
    if (held[idx])
      split.held_out.emplace_back(all[idx].u, all[idx].v);
    else
      kept.push_back(all[idx]);
  }
  split.train = Graph::from_edges(g.num_nodes(), kept, g.original_ids());
  split.achieved_fraction =
      all.empty() ? 0.0 : static_cast<double>(take) / static_cast<double>(all.size());
  split.shortfall = take < split.target || split.target == 0;
  return split;
}

std::uint64_t graph_hash(const Graph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    auto p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const auto& a = g.adjacency();
  std::uint64_t n = a.rows;
  mix(&n, sizeof n);
  for (std::size_t x : a.row_ptr) {
    std::uint64_t v = x;
    mix(&v, sizeof v);
  }
  for (std::size_t x : a.col_idx) {
    std::uint64_t v = x;
    mix(&v, sizeof v);
  }
  mix(a.values.data(), a.values.size() * sizeof(double));
  return h;
}

}  // namespace lnlm
