#pragma once

#include "lnlm/eval.hpp"
#include "lnlm/graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lnlm {

struct SbmSpec {
  std::vector<std::size_t> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Planted-partition graph; labels are block ids. A node left isolated is
// connected to one random member of its block (any node for singleton blocks).
std::pair<Graph, LabelSet> sbm_graph(const SbmSpec& spec);

// "k3", "path3", "star5", "two_cliques" (two K5 joined by one bridge),
// "barbell8" (two K4 joined by one bridge).
std::map<std::string, Graph> toy_graphs();

}  // namespace lnlm
