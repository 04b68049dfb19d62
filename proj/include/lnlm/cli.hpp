#pragma once

#include "lnlm/eval.hpp"
#include "lnlm/graph.hpp"
#include "lnlm/loworder.hpp"
#include "lnlm/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lnlm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string command;

  std::string input;
  std::string labels;
  std::string output;
  std::string embedding;   // precomputed embedding for eval-* commands
  std::string trace;
  std::string cache_dir;
  std::string save_graph;
  bool weighted = false;
  bool restrict_lcc = false;

  LowOrderParams loworder;
  LnlmHyperParams solver;
  std::uint64_t seed = 1;

  // protocols
  double train_ratio = 0.7;
  double reg = 1e-3;
  int repeats = 10;
  int clusters = 0;
  int restarts = 10;
  std::vector<double> fractions{0.1};
  std::string scorer = "lnlm";  // lnlm | common-neighbors | oracle | random

  // sweep
  std::string task = "cluster";
  std::vector<double> alpha_grid, beta_grid, gamma_grid;
  std::vector<int> m_grid, window_grid;
  int jobs = 1;

  // gen-sbm
  std::vector<std::size_t> blocks{50, 50};
  double p_in = 0.3;
  double p_out = 0.01;

  nlohmann::json to_json() const;
};

// Loads the input graph, honouring --weighted and --restrict-lcc.
Graph load_graph(const RunConfig& cfg);

// Dimensions clamped to the node count; notes are appended for every clamp.
RunConfig resolve_dimensions(RunConfig cfg, std::size_t n, std::vector<std::string>* notes = nullptr);

// Features (cached under cache_dir when set) followed by the solver.
EmbeddingModel embed_graph(const Graph& g, const RunConfig& cfg);

struct SweepResult {
  std::size_t cells = 0;
  std::size_t computed = 0;
  std::size_t skipped = 0;
};
SweepResult run_sweep(const Graph& g, const LabelSet* labels, const RunConfig& cfg);

// Parses arguments (without the program name) and runs the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lnlm::cli
