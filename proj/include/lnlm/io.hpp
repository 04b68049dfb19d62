#pragma once

#include "lnlm/common.hpp"
#include "lnlm/graph.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace lnlm {

// First line `n k`, then `original_id v_1 ... v_k` per node, 17 significant digits.
void write_embedding(std::ostream& out, const Matrix& v, const Graph& g);

struct LoadedEmbedding {
  std::vector<NodeId> ids;
  Matrix v;
};
LoadedEmbedding read_embedding(std::istream& in);

// Rows reordered to match the graph's internal ids.
Matrix align_embedding(const LoadedEmbedding& e, const Graph& g);

// `iter,loss` with a header line.
void write_trace_csv(std::ostream& out, const std::vector<std::pair<int, double>>& trace);

}  // namespace lnlm
