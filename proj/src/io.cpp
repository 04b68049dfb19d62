#include "lnlm/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

namespace lnlm {

void write_embedding(std::ostream& out, const Matrix& v, const Graph& g) {
  if (static_cast<std::size_t>(v.rows()) != g.num_nodes())
    throw InputError("embedding row count does not match the graph");
  out << v.rows() << ' ' << v.cols() << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out << g.original_ids()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      std::snprintf(buf, sizeof buf, " %.17g", v(i, j));
      out << buf;
    }
    out << '\n';
  }
}

LoadedEmbedding read_embedding(std::istream& in) {
  long long n = 0, k = 0;
  if (!(in >> n >> k) || n < 0 || k < 0) throw InputError("embedding file: bad header");
  LoadedEmbedding e;
  e.v.resize(n, k);
  e.ids.resize(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    if (!(in >> e.ids[static_cast<std::size_t>(i)]))
      throw InputError("embedding file: truncated at row " + std::to_string(i));
    for (long long j = 0; j < k; ++j)
      if (!(in >> e.v(i, j))) throw InputError("embedding file: truncated at row " + std::to_string(i));
  }
  return e;
}

Matrix align_embedding(const LoadedEmbedding& e, const Graph& g) {
  std::unordered_map<NodeId, Eigen::Index> row;
  for (std::size_t i = 0; i < e.ids.size(); ++i) row.emplace(e.ids[i], static_cast<Eigen::Index>(i));
  Matrix out(static_cast<Eigen::Index>(g.num_nodes()), e.v.cols());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    auto it = row.find(g.original_ids()[i]);
    if (it == row.end())
      throw InputError("embedding has no row for node " + std::to_string(g.original_ids()[i]));
    out.row(static_cast<Eigen::Index>(i)) = e.v.row(it->second);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<std::pair<int, double>>& trace) {
  out << "iter,loss\n";
  char buf[40];
  for (auto [it, l] : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", l);
    out << it << ',' << buf << '\n';
  }
}

}  // namespace lnlm
