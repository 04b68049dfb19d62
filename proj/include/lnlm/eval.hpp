#pragma once

#include "lnlm/common.hpp"
#include "lnlm/graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lnlm {

// Per-node class ids. An empty entry marks an unlabeled node.
struct LabelSet {
  std::size_t num_classes = 0;
  bool multi_label = false;
  std::vector<std::vector<int>> labels;
  std::vector<std::string> class_names;  // optional, indexed by class id

  static LabelSet single(std::vector<int> ids);

  std::size_t size() const { return labels.size(); }
  bool labeled(std::size_t i) const { return !labels[i].empty(); }
  std::vector<std::size_t> labeled_nodes() const;
  // First label of each node, -1 when unlabeled.
  std::vector<int> primary() const;

  void validate() const;
};

// `node_id label[,label...]` lines; nodes are matched through the graph's
// original ids. Class names are sorted, then numbered from 0.
LabelSet load_labels(std::istream& in, const Graph& g);
void save_labels(std::ostream& out, const LabelSet& labels, const Graph& g);

struct EvalReport {
  std::string task;  // classify | cluster | linkpred
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, double> metrics;
  int repeats = 0;
  std::vector<std::map<std::string, double>> per_repeat;

  nlohmann::json to_json() const;
};

// ---- clustering -----------------------------------------------------------

struct KMeansResult {
  std::vector<int> labels;
  double wcss = 0.0;
  std::vector<double> wcss_trace;  // per Lloyd iteration of the chosen restart
};

// Lloyd's algorithm with k-means++ seeding; keeps the restart with the
// lowest within-cluster sum of squares.
KMeansResult kmeans(const Matrix& x, int clusters, int restarts, std::uint64_t seed);

// Within-cluster sum of squared distances to the cluster means.
double within_cluster_ss(const Matrix& x, std::span<const int> labels);

// I(a;b) / sqrt(H(a) H(b)), natural logs.
double nmi(std::span<const int> a, std::span<const int> b);

// ---- classification -------------------------------------------------------

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Shuffled split with floor(ratio * size) training nodes, at least one on
// each side. With `stratify` (single-label), the floor is taken per class.
TrainTestSplit train_test_split(std::span<const std::size_t> nodes, double ratio,
                                std::uint64_t seed, const LabelSet* stratify = nullptr);

struct LogisticLoss {
  double value = 0.0;
  Vector grad_w;
  double grad_b = 0.0;
};

// Mean cross-entropy plus reg/2 * ||w||^2 (bias unregularized); y in {0,1}.
LogisticLoss logistic_loss(const Matrix& x, const Vector& y, const Vector& w, double bias,
                           double reg);

struct BinaryLogistic {
  Vector w;
  double bias = 0.0;
  bool constant = false;
};

// Full-batch gradient descent with Armijo backtracking; stops after
// `max_epochs` or when the gradient norm falls below `tol`.
BinaryLogistic train_binary_logistic(const Matrix& x, const Vector& y, double reg,
                                     int max_epochs = 500, double tol = 1e-6);

struct OvrClassifier {
  std::vector<BinaryLogistic> models;  // one per class
  Vector mean;                         // feature standardization (training statistics)
  Vector scale;
  std::vector<int> flagged;            // classes absent from training or single-valued

  Matrix scores(const Matrix& x) const;
};

OvrClassifier train_ovr_classifier(const Matrix& x, const LabelSet& y,
                                   std::span<const std::size_t> train_ids, double reg,
                                   std::uint64_t seed);

// Indices of the t largest scores (ties broken by lower index), ascending.
std::vector<int> top_t_classes(std::span<const double> scores, std::size_t t);

// Multi-label: top-t with t the node's true label count. Single-label: argmax.
LabelSet predict_labels(const OvrClassifier& clf, const Matrix& x,
                        std::span<const std::size_t> ids, const LabelSet& truth);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

F1Scores micro_macro_f1(const LabelSet& pred, const LabelSet& truth,
                        std::span<const std::size_t> test_ids);

// ---- link prediction ------------------------------------------------------

double score_edge(const Matrix& v, std::size_t a, std::size_t b);

// Distinct unordered non-adjacent pairs of `g`, uniformly at random.
std::vector<std::pair<std::size_t, std::size_t>> sample_negative_edges(const Graph& g,
                                                                       std::size_t count,
                                                                       std::uint64_t seed);

// P(random positive > random negative), ties count one half.
double auc(std::span<const double> pos, std::span<const double> neg);

using EdgeScorer = std::function<double(std::size_t, std::size_t)>;
// Builds a scorer from the training graph of one split.
using ScorerFactory = std::function<EdgeScorer(const Graph& train, std::uint64_t seed)>;

EdgeScorer embedding_scorer(Matrix v);
EdgeScorer common_neighbor_scorer(const Graph& g);

// ---- protocols ------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

struct ClassifyOptions {
  double train_ratio = 0.7;
  double reg = 1e-3;
  int repeats = 10;
  std::uint64_t seed = 1;
};
EvalReport run_classify_protocol(const Matrix& x, const LabelSet& labels,
                                 const ClassifyOptions& opt);

struct ClusterOptions {
  int clusters = 0;  // 0: number of classes
  int restarts = 10;
  int repeats = 10;
  std::uint64_t seed = 1;
};
EvalReport run_cluster_protocol(const Matrix& x, const LabelSet& labels,
                                const ClusterOptions& opt);

struct LinkPredOptions {
  std::vector<double> fractions{0.1};
  int repeats = 10;
  std::uint64_t seed = 1;
};
EvalReport run_linkpred_protocol(const Graph& g, const ScorerFactory& factory,
                                 const LinkPredOptions& opt);

}  // namespace lnlm
