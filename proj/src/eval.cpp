#include "lnlm/eval.hpp"

#include "lnlm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lnlm {

// ---- labels ---------------------------------------------------------------

LabelSet LabelSet::single(std::vector<int> ids) {
  LabelSet s;
  s.labels.resize(ids.size());
  int top = -1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= 0) s.labels[i] = {ids[i]};
    top = std::max(top, ids[i]);
  }
  s.num_classes = static_cast<std::size_t>(top + 1);
  return s;
}

std::vector<std::size_t> LabelSet::labeled_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labeled(i)) out.push_back(i);
  return out;
}

std::vector<int> LabelSet::primary() const {
  std::vector<int> out(labels.size(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labeled(i)) out[i] = labels[i].front();
  return out;
}

void LabelSet::validate() const {
  for (const auto& ls : labels)
    for (int c : ls)
      if (c < 0 || static_cast<std::size_t>(c) >= num_classes)
        throw InputError("label id out of range");
}

LabelSet load_labels(std::istream& in, const Graph& g) {
  std::unordered_map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) index.emplace(g.original_ids()[i], i);

  std::vector<std::set<std::string>> raw(g.num_nodes());
  std::set<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    NodeId id = 0;
    if (!(ls >> id)) throw InputError("label file line " + std::to_string(line_no) + ": bad node id");
    std::string tok;
    std::vector<std::string> found;
    while (ls >> tok) {
      std::stringstream parts(tok);
      std::string part;
      while (std::getline(parts, part, ','))
        if (!part.empty()) found.push_back(part);
    }
    if (found.empty())
      throw InputError("label file line " + std::to_string(line_no) + ": no label");
    auto it = index.find(id);
    if (it == index.end()) continue;  // node not in (possibly restricted) graph
    for (auto& f : found) {
      names.insert(f);
      raw[it->second].insert(f);
    }
  }

  std::vector<std::string> ordered(names.begin(), names.end());
  const bool numeric = std::all_of(ordered.begin(), ordered.end(), [](const std::string& s) {
    return !s.empty() && s.find_first_not_of("-0123456789") == std::string::npos && s.size() < 18;
  });
  if (numeric)
    std::sort(ordered.begin(), ordered.end(),
              [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
  std::unordered_map<std::string, int> cls;
  for (std::size_t c = 0; c < ordered.size(); ++c) cls.emplace(ordered[c], static_cast<int>(c));

  LabelSet out;
  out.num_classes = ordered.size();
  out.class_names = ordered;
  out.labels.resize(g.num_nodes());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (const auto& name : raw[i]) out.labels[i].push_back(cls.at(name));
    std::sort(out.labels[i].begin(), out.labels[i].end());
    if (out.labels[i].size() > 1) out.multi_label = true;
  }
  return out;
}

void save_labels(std::ostream& out, const LabelSet& labels, const Graph& g) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels.labeled(i)) continue;
    out << g.original_ids()[i] << ' ';
    for (std::size_t j = 0; j < labels.labels[i].size(); ++j) {
      int c = labels.labels[i][j];
      if (j) out << ',';
      if (static_cast<std::size_t>(c) < labels.class_names.size())
        out << labels.class_names[static_cast<std::size_t>(c)];
      else
        out << c;
    }
    out << '\n';
  }
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["task"] = task;
  j["params"] = params;
  j["metrics"] = metrics;
  j["repeats"] = repeats;
  j["per_repeat"] = per_repeat;
  return j;
}

// ---- clustering -----------------------------------------------------------

double within_cluster_ss(const Matrix& x, std::span<const int> labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  Matrix sums = Matrix::Zero(k, x.cols());
  std::vector<double> count(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    count[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    s += (x.row(i) - sums.row(l) / count[static_cast<std::size_t>(l)]).squaredNorm();
  }
  return s;
}

namespace {

Matrix kmeanspp_seed(const Matrix& x, int clusters, std::mt19937_64& rng) {
  const auto n = x.rows();
  Matrix centers(clusters, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < clusters; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index chosen;
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> dist(d2.begin(), d2.end());
      chosen = dist(rng);
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Matrix& x, Matrix centers) {
  const auto n = x.rows();
  const auto k = centers.rows();
  KMeansResult r;
  std::vector<double> dist2;
  for (int iter = 0; iter < 300; ++iter) {
    kernels::nearest_centers(x, centers, r.labels, dist2);
    r.wcss_trace.push_back(std::accumulate(dist2.begin(), dist2.end(), 0.0));

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Eigen::Index> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++count[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
    }
    Matrix next = centers;
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Eigen::Index c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) {
        next.row(c) = sums.row(c) / static_cast<double>(count[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its center.
      Eigen::Index far = -1;
      double best = -1.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!taken[static_cast<std::size_t>(i)] && dist2[static_cast<std::size_t>(i)] > best) {
          best = dist2[static_cast<std::size_t>(i)];
          far = i;
        }
      if (far < 0) far = 0;
      taken[static_cast<std::size_t>(far)] = true;
      next.row(c) = x.row(far);
    }
    const double moved = (next - centers).rowwise().norm().maxCoeff();
    centers = std::move(next);
    if (moved < 1e-8) break;
  }
  kernels::nearest_centers(x, centers, r.labels, dist2);
  r.wcss_trace.push_back(std::accumulate(dist2.begin(), dist2.end(), 0.0));
  r.wcss = within_cluster_ss(x, r.labels);
  return r;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int clusters, int restarts, std::uint64_t seed) {
  if (clusters < 1 || clusters > x.rows()) throw InputError("cluster count must lie in [1, n]");
  if (restarts < 1) throw InputError("restarts must be >= 1");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KMeansResult cur = lloyd(x, kmeanspp_seed(x, clusters, rng));
    if (cur.wcss < best.wcss) best = std::move(cur);
  }
  return best;
}

double nmi(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InputError("nmi: partitions have different lengths");
  if (a.empty()) throw InputError("nmi: empty partitions");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& c) {
    double h = 0.0;
    for (const auto& [_, cnt] : c) h -= cnt / n * std::log(cnt / n);
    return h;
  };
  const double ha = entropy(ca), hb = entropy(cb);
  if (ca.size() == 1 && cb.size() == 1) return 1.0;
  if (ca.size() == 1 || cb.size() == 1) return 0.0;
  double mi = 0.0;
  for (const auto& [key, cnt] : joint)
    mi += cnt / n * std::log(cnt * n / (ca[key.first] * cb[key.second]));
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

// ---- classification -------------------------------------------------------

TrainTestSplit train_test_split(std::span<const std::size_t> nodes, double ratio,
                                std::uint64_t seed, const LabelSet* stratify) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("train ratio must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  TrainTestSplit s;
  auto take = [&](std::vector<std::size_t> group) {
    std::shuffle(group.begin(), group.end(), rng);
    auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(group.size())));
    if (group.size() >= 2) cut = std::clamp<std::size_t>(cut, 1, group.size() - 1);
    else cut = group.size();
    s.train.insert(s.train.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(cut));
    s.test.insert(s.test.end(), group.begin() + static_cast<std::ptrdiff_t>(cut), group.end());
  };
  if (stratify && !stratify->multi_label) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t id : nodes) {
      if (id >= stratify->size() || !stratify->labeled(id)) continue;
      by_class[stratify->labels[id].front()].push_back(id);
    }
    for (auto& [_, group] : by_class) take(std::move(group));
  } else {
    take(std::vector<std::size_t>(nodes.begin(), nodes.end()));
  }
  if (s.train.empty() || s.test.empty()) throw InputError("train/test split leaves a side empty");
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

namespace {

double log1p_exp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LogisticLoss logistic_loss(const Matrix& x, const Vector& y, const Vector& w, double bias,
                           double reg) {
  const double n = static_cast<double>(x.rows());
  const Vector z = (x * w).array() + bias;
  LogisticLoss out;
  Vector resid(x.rows());
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    // -[y log s(z) + (1-y) log(1-s(z))] = log(1+e^z) - y z
    total += log1p_exp(z(i)) - y(i) * z(i);
    resid(i) = sigmoid(z(i)) - y(i);
  }
  out.value = total / n + 0.5 * reg * w.squaredNorm();
  out.grad_w = x.transpose() * resid / n + reg * w;
  out.grad_b = resid.sum() / n;
  return out;
}

BinaryLogistic train_binary_logistic(const Matrix& x, const Vector& y, double reg, int max_epochs,
                                     double tol) {
  BinaryLogistic m;
  m.w = Vector::Zero(x.cols());
  const double pos = y.sum();
  if (pos == 0.0 || pos == static_cast<double>(y.size())) {
    m.constant = true;
    m.bias = pos == 0.0 ? -30.0 : 30.0;
    return m;
  }
  double step = 1.0;
  LogisticLoss cur = logistic_loss(x, y, m.w, m.bias, reg);
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    const double gnorm2 = cur.grad_w.squaredNorm() + cur.grad_b * cur.grad_b;
    if (std::sqrt(gnorm2) < tol) break;
    step = std::min(step * 2.0, 1e6);
    for (;;) {
      Vector w = m.w - step * cur.grad_w;
      double b = m.bias - step * cur.grad_b;
      LogisticLoss next = logistic_loss(x, y, w, b, reg);
      if (next.value <= cur.value - 0.5 * step * gnorm2 || step < 1e-12) {
        m.w = std::move(w);
        m.bias = b;
        cur = std::move(next);
        break;
      }
      step *= 0.5;
    }
  }
  return m;
}

Matrix OvrClassifier::scores(const Matrix& x) const {
  Matrix xs = (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  Matrix s(x.rows(), static_cast<Eigen::Index>(models.size()));
  for (std::size_t c = 0; c < models.size(); ++c)
    s.col(static_cast<Eigen::Index>(c)) = (xs * models[c].w).array() + models[c].bias;
  return s;
}

OvrClassifier train_ovr_classifier(const Matrix& x, const LabelSet& y,
                                   std::span<const std::size_t> train_ids, double reg,
                                   std::uint64_t /*seed: full-batch training is deterministic*/) {
  if (train_ids.empty()) throw InputError("classifier needs at least one training node");
  Matrix xt(static_cast<Eigen::Index>(train_ids.size()), x.cols());
  for (std::size_t i = 0; i < train_ids.size(); ++i)
    xt.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(train_ids[i]));

  OvrClassifier clf;
  clf.mean = xt.colwise().mean().transpose();
  Matrix centered = xt.rowwise() - clf.mean.transpose();
  clf.scale = (centered.colwise().squaredNorm() / static_cast<double>(xt.rows())).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < clf.scale.size(); ++j)
    if (!(clf.scale(j) > 1e-12)) clf.scale(j) = 1.0;
  const Matrix xs = centered.array().rowwise() / clf.scale.transpose().array();

  for (std::size_t c = 0; c < y.num_classes; ++c) {
    Vector target = Vector::Zero(xs.rows());
    for (std::size_t i = 0; i < train_ids.size(); ++i) {
      const auto& ls = y.labels[train_ids[i]];
      if (std::find(ls.begin(), ls.end(), static_cast<int>(c)) != ls.end())
        target(static_cast<Eigen::Index>(i)) = 1.0;
    }
    clf.models.push_back(train_binary_logistic(xs, target, reg));
    if (clf.models.back().constant) clf.flagged.push_back(static_cast<int>(c));
  }
  return clf;
}

std::vector<int> top_t_classes(std::span<const double> scores, std::size_t t) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  t = std::min(t, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t), idx.end(),
                    [&](int a, int b) {
                      return scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]
                                 ? scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)]
                                 : a < b;
                    });
  idx.resize(t);
  std::sort(idx.begin(), idx.end());
  return idx;
}

LabelSet predict_labels(const OvrClassifier& clf, const Matrix& x,
                        std::span<const std::size_t> ids, const LabelSet& truth) {
  LabelSet pred;
  pred.num_classes = truth.num_classes;
  pred.multi_label = truth.multi_label;
  pred.class_names = truth.class_names;
  pred.labels.resize(truth.size());
  Matrix sub(static_cast<Eigen::Index>(ids.size()), x.cols());
  for (std::size_t i = 0; i < ids.size(); ++i)
    sub.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(ids[i]));
  const Matrix s = clf.scores(sub);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<double> row(s.row(static_cast<Eigen::Index>(i)).data(),
                            s.row(static_cast<Eigen::Index>(i)).data() + s.cols());
    const std::size_t t = truth.multi_label ? std::max<std::size_t>(truth.labels[ids[i]].size(), 1) : 1;
    pred.labels[ids[i]] = top_t_classes(row, t);
  }
  return pred;
}

F1Scores micro_macro_f1(const LabelSet& pred, const LabelSet& truth,
                        std::span<const std::size_t> test_ids) {
  const std::size_t c = std::max(pred.num_classes, truth.num_classes);
  std::vector<double> tp(c, 0.0), fp(c, 0.0), fn(c, 0.0);
  for (std::size_t id : test_ids) {
    const auto& p = pred.labels[id];
    const auto& t = truth.labels[id];
    for (int k : p) {
      if (std::find(t.begin(), t.end(), k) != t.end()) tp[static_cast<std::size_t>(k)] += 1;
      else fp[static_cast<std::size_t>(k)] += 1;
    }
    for (int k : t)
      if (std::find(p.begin(), p.end(), k) == p.end()) fn[static_cast<std::size_t>(k)] += 1;
  }
  auto f1 = [](double tp_, double fp_, double fn_) {
    const double den = 2 * tp_ + fp_ + fn_;
    return den > 0 ? 2 * tp_ / den : 0.0;
  };
  F1Scores out;
  double stp = 0, sfp = 0, sfn = 0, macro = 0;
  for (std::size_t k = 0; k < c; ++k) {
    stp += tp[k];
    sfp += fp[k];
    sfn += fn[k];
    macro += f1(tp[k], fp[k], fn[k]);
  }
  out.micro = f1(stp, sfp, sfn);
  out.macro = c ? macro / static_cast<double>(c) : 0.0;
  return out;
}

// ---- link prediction ------------------------------------------------------

double score_edge(const Matrix& v, std::size_t a, std::size_t b) {
  return v.row(static_cast<Eigen::Index>(a)).dot(v.row(static_cast<Eigen::Index>(b)));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_negative_edges(const Graph& g,
                                                                       std::size_t count,
                                                                       std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  const std::size_t available = pairs - g.num_edges();
  if (count > available)
    throw InputError("not enough non-edges: requested " + std::to_string(count) + ", graph has " +
                     std::to_string(available));
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(count);

  if (2 * count > available) {
    // Dense request: enumerate and shuffle.
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (!g.has_edge(u, v)) out.emplace_back(u, v);
    std::shuffle(out.begin(), out.end(), rng);
    out.resize(count);
    return out;
  }
  std::unordered_set<std::uint64_t> seen;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (out.size() < count) {
    std::size_t u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (g.has_edge(u, v)) continue;
    if (!seen.insert(static_cast<std::uint64_t>(u) * n + v).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

double auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw InputError("auc needs positive and negative scores");
  std::vector<std::pair<double, int>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, 1);
  for (double s : neg) all.emplace_back(s, 0);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second) rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(pos.size()), nn = static_cast<double>(neg.size());
  return (rank_sum - np * (np + 1) / 2) / (np * nn);
}

EdgeScorer embedding_scorer(Matrix v) {
  return [v = std::move(v)](std::size_t a, std::size_t b) { return score_edge(v, a, b); };
}

EdgeScorer common_neighbor_scorer(const Graph& g) {
  return [g](std::size_t a, std::size_t b) {
    auto na = g.neighbors(a), nb = g.neighbors(b);
    std::size_t i = 0, j = 0, c = 0;
    while (i < na.size() && j < nb.size()) {
      if (na[i] < nb[j]) ++i;
      else if (na[i] > nb[j]) ++j;
      else { ++c; ++i; ++j; }
    }
    return static_cast<double>(c);
  };
}

// ---- protocols ------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the combined inputs
  std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

void finish_means(EvalReport& r) {
  r.metrics.clear();
  for (const auto& rep : r.per_repeat)
    for (const auto& [k, v] : rep) r.metrics[k] += v / static_cast<double>(r.per_repeat.size());
  for (const auto& [k, v] : r.metrics)
    if (!std::isfinite(v)) throw NumericError("metric " + k + " is not finite");
}

std::string fraction_key(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "auc@%.2f", f);
  return buf;
}

}  // namespace

EvalReport run_classify_protocol(const Matrix& x, const LabelSet& labels,
                                 const ClassifyOptions& opt) {
  labels.validate();
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw InputError("embedding and label set sizes differ");
  if (opt.repeats < 1) throw InputError("repeats must be >= 1");
  EvalReport r;
  r.task = "classify";
  r.repeats = opt.repeats;
  r.params = {{"train_ratio", opt.train_ratio},
              {"reg", opt.reg},
              {"repeats", opt.repeats},
              {"seed", opt.seed},
              {"classifier", "one-vs-rest logistic regression"},
              {"multilabel_rule", labels.multi_label ? "top-t" : "argmax"},
              {"standardize", true}};
  const auto nodes = labels.labeled_nodes();
  for (int rep = 0; rep < opt.repeats; ++rep) {
    const auto split = train_test_split(nodes, opt.train_ratio,
                                        derive_seed(opt.seed, static_cast<std::uint64_t>(rep)), &labels);
    const auto clf = train_ovr_classifier(x, labels, split.train, opt.reg, opt.seed);
    const auto pred = predict_labels(clf, x, split.test, labels);
    const auto f1 = micro_macro_f1(pred, labels, split.test);
    r.per_repeat.push_back({{"micro_f1", f1.micro}, {"macro_f1", f1.macro}});
  }
  finish_means(r);
  return r;
}

EvalReport run_cluster_protocol(const Matrix& x, const LabelSet& labels,
                                const ClusterOptions& opt) {
  labels.validate();
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw InputError("embedding and label set sizes differ");
  if (opt.repeats < 1) throw InputError("repeats must be >= 1");
  const auto nodes = labels.labeled_nodes();
  if (nodes.empty()) throw InputError("no labeled nodes to cluster");
  const int clusters = opt.clusters > 0 ? opt.clusters : static_cast<int>(labels.num_classes);
  Matrix sub(static_cast<Eigen::Index>(nodes.size()), x.cols());
  std::vector<int> truth;
  const auto prim = labels.primary();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(nodes[i]));
    truth.push_back(prim[nodes[i]]);
  }
  EvalReport r;
  r.task = "cluster";
  r.repeats = opt.repeats;
  r.params = {{"clusters", clusters},
              {"restarts", opt.restarts},
              {"repeats", opt.repeats},
              {"seed", opt.seed},
              {"algorithm", "k-means++ / Lloyd"},
              {"nmi_normalization", "geometric mean"}};
  for (int rep = 0; rep < opt.repeats; ++rep) {
    const auto km = kmeans(sub, clusters, opt.restarts, derive_seed(opt.seed, static_cast<std::uint64_t>(rep)));
    r.per_repeat.push_back({{"nmi", nmi(km.labels, truth)}, {"wcss", km.wcss}});
  }
  finish_means(r);
  return r;
}

EvalReport run_linkpred_protocol(const Graph& g, const ScorerFactory& factory,
                                 const LinkPredOptions& opt) {
  if (opt.repeats < 1) throw InputError("repeats must be >= 1");
  if (opt.fractions.empty()) throw InputError("at least one edge fraction is required");
  EvalReport r;
  r.task = "linkpred";
  r.repeats = opt.repeats;
  r.params = {{"fractions", opt.fractions},
              {"repeats", opt.repeats},
              {"seed", opt.seed},
              {"negatives_per_positive", 1},
              {"edge_score", "dot product"}};
  nlohmann::json achieved = nlohmann::json::array();
  for (int rep = 0; rep < opt.repeats; ++rep) {
    std::map<std::string, double> row;
    double sum = 0.0;
    for (std::size_t fi = 0; fi < opt.fractions.size(); ++fi) {
      const auto s = derive_seed(opt.seed, fi, static_cast<std::uint64_t>(rep));
      const EdgeSplit split = remove_edges_keep_connected(g, opt.fractions[fi], s);
      if (split.held_out.empty())
        throw InputError("no edges can be held out at fraction " + std::to_string(opt.fractions[fi]));
      if (rep == 0) achieved.push_back(split.achieved_fraction);
      const EdgeScorer score = factory(split.train, s);
      const auto negatives = sample_negative_edges(g, split.held_out.size(), derive_seed(s, 7));
      std::vector<double> pos, neg;
      for (auto [u, v] : split.held_out) pos.push_back(score(u, v));
      for (auto [u, v] : negatives) neg.push_back(score(u, v));
      const double a = auc(pos, neg);
      row[fraction_key(opt.fractions[fi])] = a;
      sum += a;
    }
    row["auc"] = sum / static_cast<double>(opt.fractions.size());
    r.per_repeat.push_back(std::move(row));
  }
  r.params["achieved_fractions"] = achieved;
  finish_means(r);
  return r;
}

}  // namespace lnlm
