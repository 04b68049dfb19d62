#include "lnlm/cli.hpp"

#include "lnlm/benchgen.hpp"
#include "lnlm/io.hpp"
#include "lnlm/matrix_cache.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace lnlm::cli {

namespace fs = std::filesystem;

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},
          {"input", input},
          {"labels", labels},
          {"output", output},
          {"embedding", embedding},
          {"weighted", weighted},
          {"restrict_lcc", restrict_lcc},
          {"window", loworder.window},
          {"neg_b", loworder.neg_b},
          {"dim_d", loworder.dim},
          {"dim_m", solver.m},
          {"dim_k", solver.k},
          {"alpha", solver.alpha},
          {"beta", solver.beta},
          {"gamma", solver.gamma},
          {"delta", solver.delta},
          {"max_iter", solver.max_iter},
          {"seed", seed},
          {"train_ratio", train_ratio},
          {"reg", reg},
          {"repeats", repeats},
          {"clusters", clusters},
          {"restarts", restarts},
          {"fractions", fractions},
          {"scorer", scorer},
          {"task", task},
          {"jobs", jobs}};
}

Graph load_graph(const RunConfig& cfg) {
  std::ifstream in(cfg.input);
  if (!in) throw InputError("cannot open input file: " + cfg.input);
  Graph g = load_edge_list(in, cfg.weighted);
  if (cfg.restrict_lcc) g = largest_component(g);
  return g;
}

RunConfig resolve_dimensions(RunConfig cfg, std::size_t n, std::vector<std::string>* notes) {
  auto clamp = [&](int& value, const char* name) {
    if (value > 0 && static_cast<std::size_t>(value) > n) {
      if (notes)
        notes->push_back(std::string(name) + " reduced from " + std::to_string(value) + " to " +
                         std::to_string(n) + " (node count)");
      value = static_cast<int>(n);
    }
  };
  clamp(cfg.loworder.dim, "d");
  clamp(cfg.solver.m, "m");
  clamp(cfg.solver.k, "k");
  cfg.solver.seed = cfg.seed;
  return cfg;
}

namespace {

FeatureMatrix cached_features(const Graph& g, const RunConfig& cfg) {
  if (cfg.cache_dir.empty()) return build_loworder_features(g, cfg.loworder, cfg.seed);
  fs::create_directories(cfg.cache_dir);
  CacheKey key;
  key.kind = CacheKey::Kind::Features;
  key.graph_hash = graph_hash(g);
  key.window = static_cast<std::uint32_t>(cfg.loworder.window);
  key.neg_b = cfg.loworder.neg_b;
  key.dim = static_cast<std::uint32_t>(cfg.loworder.dim);
  key.seed = cfg.seed;
  const fs::path bpath = fs::path(cfg.cache_dir) / key.file_name();
  if (auto b = read_matrix_cache(bpath, key)) return FeatureMatrix{std::move(*b), {}};

  CacheKey mkey = key;
  mkey.kind = CacheKey::Kind::WalkMatrix;
  mkey.dim = 0;
  mkey.seed = 0;
  const fs::path mpath = fs::path(cfg.cache_dir) / mkey.file_name();
  Matrix m;
  if (auto cached = read_matrix_cache(mpath, mkey)) {
    m = std::move(*cached);
  } else {
    cfg.loworder.validate(g.num_nodes());
    m = netmf_matrix(g, cfg.loworder);
    write_matrix_cache(mpath, mkey, m);
  }
  FeatureMatrix f = truncated_svd(m, cfg.loworder.dim, cfg.seed);
  write_matrix_cache(bpath, key, f.b);
  return f;
}

}  // namespace

EmbeddingModel embed_graph(const Graph& g, const RunConfig& raw) {
  const RunConfig cfg = resolve_dimensions(raw, g.num_nodes());
  require_positive_degrees(g);
  const FeatureMatrix features = cached_features(g, cfg);
  return fit(g, features, cfg.solver);
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

LabelSet load_label_file(const RunConfig& cfg, const Graph& g) {
  if (cfg.labels.empty()) throw InputError("--labels is required for this command");
  std::ifstream in(cfg.labels);
  if (!in) throw InputError("cannot open label file: " + cfg.labels);
  return load_labels(in, g);
}

Matrix embedding_for(const Graph& g, const RunConfig& cfg) {
  if (!cfg.embedding.empty()) {
    std::ifstream in(cfg.embedding);
    if (!in) throw InputError("cannot open embedding file: " + cfg.embedding);
    return align_embedding(read_embedding(in), g);
  }
  return embed_graph(g, cfg).factors.v;
}

ScorerFactory scorer_factory(const Graph& full, const RunConfig& cfg) {
  if (cfg.scorer == "lnlm")
    return [cfg](const Graph& train, std::uint64_t s) {
      RunConfig c = cfg;
      c.seed = s;
      return embedding_scorer(embed_graph(train, c).factors.v);
    };
  if (cfg.scorer == "common-neighbors")
    return [](const Graph& train, std::uint64_t) { return common_neighbor_scorer(train); };
  if (cfg.scorer == "oracle")  // perfect scorer: peeks at the full graph
    return [full](const Graph&, std::uint64_t) {
      return EdgeScorer([full](std::size_t u, std::size_t v) { return full.has_edge(u, v) ? 1.0 : 0.0; });
    };
  if (cfg.scorer == "random")
    return [](const Graph&, std::uint64_t s) {
      auto rng = std::make_shared<std::mt19937_64>(s);
      return EdgeScorer([rng](std::size_t, std::size_t) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(*rng);
      });
    };
  throw InputError("unknown scorer: " + cfg.scorer);
}

EvalReport evaluate(const Graph& g, const LabelSet* labels, const Matrix* v, const RunConfig& cfg,
                    const std::string& task) {
  if (task == "classify") {
    ClassifyOptions o{cfg.train_ratio, cfg.reg, cfg.repeats, cfg.seed};
    return run_classify_protocol(*v, *labels, o);
  }
  if (task == "cluster") {
    ClusterOptions o{cfg.clusters, cfg.restarts, cfg.repeats, cfg.seed};
    return run_cluster_protocol(*v, *labels, o);
  }
  if (task == "linkpred") {
    LinkPredOptions o{cfg.fractions, cfg.repeats, cfg.seed};
    return run_linkpred_protocol(g, scorer_factory(g, cfg), o);
  }
  throw InputError("unknown task: " + task);
}

void write_report(const EvalReport& report, const RunConfig& cfg, std::ostream& out) {
  nlohmann::json j = report.to_json();
  j["params"]["config"] = cfg.to_json();
  if (!cfg.output.empty()) {
    std::ofstream f(cfg.output);
    if (!f) throw InputError("cannot write output file: " + cfg.output);
    f << j.dump(2) << '\n';
  }
  out << report.task << ':';
  for (const auto& [k, val] : report.metrics) out << ' ' << k << '=' << fmt(val);
  out << '\n';
}

int cmd_embed(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(cfg);
  std::vector<std::string> notes;
  const RunConfig resolved = resolve_dimensions(cfg, g.num_nodes(), &notes);
  for (const auto& n : notes) err << "note: " << n << '\n';
  if (!cfg.save_graph.empty()) {
    std::ofstream eg(cfg.save_graph), ids(cfg.save_graph + ".ids");
    if (!eg || !ids) throw InputError("cannot write graph file: " + cfg.save_graph);
    save_edge_list(eg, g);
    save_id_map(ids, g);
  }
  const EmbeddingModel model = embed_graph(g, resolved);
  std::ofstream f(cfg.output);
  if (!f) throw InputError("cannot write output file: " + cfg.output);
  write_embedding(f, model.factors.v, g);
  if (!cfg.trace.empty()) {
    std::ofstream t(cfg.trace);
    if (!t) throw InputError("cannot write trace file: " + cfg.trace);
    write_trace_csv(t, model.loss_trace);
  }
  out << "embed: n=" << g.num_nodes() << " k=" << model.factors.v.cols()
      << " iterations=" << model.iterations_run << " converged=" << (model.converged ? 1 : 0)
      << " loss=" << fmt(model.loss_trace.back().second) << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const std::string& task, std::ostream& out) {
  const Graph g = load_graph(cfg);
  EvalReport report;
  if (task == "linkpred") {
    report = evaluate(g, nullptr, nullptr, cfg, task);
  } else {
    const LabelSet labels = load_label_file(cfg, g);
    const Matrix v = embedding_for(g, cfg);
    report = evaluate(g, &labels, &v, cfg, task);
  }
  write_report(report, cfg, out);
  return kExitOk;
}

int cmd_gen_sbm(const RunConfig& cfg, std::ostream& out) {
  SbmSpec spec{cfg.blocks, cfg.p_in, cfg.p_out, cfg.seed};
  auto [g, labels] = sbm_graph(spec);
  std::ofstream eg(cfg.output);
  if (!eg) throw InputError("cannot write output file: " + cfg.output);
  eg << "# sbm blocks=" << join(cfg.blocks) << " p_in=" << cfg.p_in << " p_out=" << cfg.p_out
     << " seed=" << cfg.seed << '\n';
  save_edge_list(eg, g);
  if (!cfg.labels.empty()) {
    std::ofstream lf(cfg.labels);
    if (!lf) throw InputError("cannot write label file: " + cfg.labels);
    save_labels(lf, labels, g);
  }
  out << "gen-sbm: n=" << g.num_nodes() << " edges=" << g.num_edges() << '\n';
  return kExitOk;
}

}  // namespace

SweepResult run_sweep(const Graph& g, const LabelSet* labels, const RunConfig& cfg) {
  if (cfg.output.empty()) throw InputError("sweep needs --output");
  if (cfg.task != "linkpred" && !labels) throw InputError("sweep task needs --labels");
  auto grid_or = [](const auto& grid, auto def) {
    using T = decltype(def);
    return grid.empty() ? std::vector<T>{def} : std::vector<T>(grid.begin(), grid.end());
  };
  const auto alphas = grid_or(cfg.alpha_grid, cfg.solver.alpha);
  const auto betas = grid_or(cfg.beta_grid, cfg.solver.beta);
  const auto gammas = grid_or(cfg.gamma_grid, cfg.solver.gamma);
  const auto ms = grid_or(cfg.m_grid, cfg.solver.m);
  const auto windows = grid_or(cfg.window_grid, cfg.loworder.window);

  struct Cell {
    double alpha, beta, gamma;
    int m, window;
  };
  std::vector<Cell> cells;
  for (double a : alphas)
    for (double b : betas)
      for (double c : gammas)
        for (int m : ms)
          for (int w : windows) cells.push_back({a, b, c, m, w});

  const std::vector<std::string> metric_names =
      cfg.task == "classify" ? std::vector<std::string>{"micro_f1", "macro_f1"}
      : cfg.task == "cluster" ? std::vector<std::string>{"nmi"}
                              : std::vector<std::string>{"auc"};

  const std::string log_path = cfg.output + ".done";
  std::set<std::size_t> done;
  std::map<std::size_t, std::string> kept_rows;
  if (fs::exists(log_path) && fs::exists(cfg.output)) {
    std::ifstream log(log_path);
    std::size_t idx;
    while (log >> idx) done.insert(idx);
    std::ifstream csv(cfg.output);
    std::string line;
    while (std::getline(csv, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("cell,", 0) == 0) continue;
      const std::size_t idx2 = std::stoul(line.substr(0, line.find(',')));
      if (done.count(idx2)) kept_rows.emplace(idx2, line);
    }
    for (auto it = done.begin(); it != done.end();)
      it = kept_rows.count(*it) ? std::next(it) : done.erase(it);
  }

  RunConfig echo = cfg;
  std::ofstream csv(cfg.output, std::ios::trunc);
  if (!csv) throw InputError("cannot write output file: " + cfg.output);
  csv << "# config: " << echo.to_json().dump() << '\n';
  csv << "cell,alpha,beta,gamma,m,window,seed";
  for (const auto& m : metric_names) csv << ',' << m;
  csv << '\n';
  for (const auto& [_, row] : kept_rows) csv << row << '\n';
  csv.flush();
  {
    std::ofstream log(log_path, std::ios::trunc);
    for (std::size_t idx : done) log << idx << '\n';
  }
  std::ofstream log(log_path, std::ios::app);

  SweepResult result;
  result.cells = cells.size();
  result.skipped = done.size();

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!done.count(i)) todo.push_back(i);

  std::mutex mu;
  std::map<std::size_t, std::string> pending;
  std::size_t next_write = 0;  // position in `todo`
  std::exception_ptr failure;
  std::atomic<std::size_t> cursor{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t pos = cursor.fetch_add(1);
      if (pos >= todo.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      const std::size_t idx = todo[pos];
      const Cell& c = cells[idx];
      try {
        RunConfig cc = cfg;
        cc.solver.alpha = c.alpha;
        cc.solver.beta = c.beta;
        cc.solver.gamma = c.gamma;
        cc.solver.m = c.m;
        cc.loworder.window = c.window;
        cc.seed = cfg.seed + idx;
        EvalReport rep;
        if (cfg.task == "linkpred") {
          rep = evaluate(g, labels, nullptr, cc, cfg.task);
        } else {
          const Matrix v = embed_graph(g, cc).factors.v;
          rep = evaluate(g, labels, &v, cc, cfg.task);
        }
        std::ostringstream row;
        row << idx << ',' << fmt(c.alpha) << ',' << fmt(c.beta) << ',' << fmt(c.gamma) << ','
            << c.m << ',' << c.window << ',' << cc.seed;
        for (const auto& m : metric_names) row << ',' << fmt(rep.metrics.at(m));

        std::lock_guard lock(mu);
        pending.emplace(pos, row.str());
        while (pending.count(next_write)) {
          csv << pending[next_write] << '\n';
          csv.flush();
          log << todo[next_write] << '\n';
          log.flush();
          pending.erase(next_write);
          ++next_write;
          ++result.computed;
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, bool needs_input = true) {
  if (needs_input) {
    sub->add_option("--input", cfg.input, "Edge list (u v [w] per line)")->required();
    sub->add_flag("--weighted", cfg.weighted, "Read the third column as edge weight");
    sub->add_flag("--restrict-lcc", cfg.restrict_lcc, "Keep only the largest connected component");
  }
  sub->add_option("--output", cfg.output, "Output path");
  sub->add_option("--seed", cfg.seed, "Random seed");
}

void add_model(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--dim-k", cfg.solver.k, "Embedding dimension k")->check(CLI::PositiveNumber);
  sub->add_option("--dim-m", cfg.solver.m, "Local feature dimension m")->check(CLI::PositiveNumber);
  sub->add_option("--dim-d", cfg.loworder.dim, "Low-order feature dimension d")->check(CLI::PositiveNumber);
  sub->add_option("--window", cfg.loworder.window, "Random-walk window T")->check(CLI::PositiveNumber);
  sub->add_option("--neg-b", cfg.loworder.neg_b, "Negative sampling constant b");
  sub->add_option("--alpha", cfg.solver.alpha, "Weight of ||Z - VU||^2");
  sub->add_option("--beta", cfg.solver.beta, "Weight of ||VH - B||^2");
  sub->add_option("--gamma", cfg.solver.gamma, "Weight of the U/H penalty");
  sub->add_option("--delta", cfg.solver.delta, "Relative loss change for convergence");
  sub->add_option("--max-iter", cfg.solver.max_iter, "Maximum number of sweeps");
  sub->add_option("--cache-dir", cfg.cache_dir, "Directory for cached M/B matrices");
}

void add_protocol(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--repeats", cfg.repeats, "Protocol repeats")->check(CLI::PositiveNumber);
  sub->add_option("--train-ratio", cfg.train_ratio, "Training share of labeled nodes");
  sub->add_option("--reg", cfg.reg, "L2 strength of the logistic models");
  sub->add_option("--clusters", cfg.clusters, "k-means clusters (0 = number of classes)");
  sub->add_option("--restarts", cfg.restarts, "k-means restarts")->check(CLI::PositiveNumber);
  sub->add_option("--fraction", cfg.fractions, "Held-out edge fractions")->delimiter(',');
  sub->add_option("--scorer", cfg.scorer, "Link scorer: lnlm, common-neighbors, oracle, random")
      ->check(CLI::IsMember({"lnlm", "common-neighbors", "oracle", "random"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Low-order network embedding via joint non-negative matrix factorization"};
  app.require_subcommand(1);

  auto* embed = app.add_subcommand("embed", "Learn node embeddings");
  add_common(embed, cfg);
  add_model(embed, cfg);
  embed->add_option("--trace", cfg.trace, "Write the loss trace as CSV");
  embed->add_option("--save-graph", cfg.save_graph, "Write the canonical edge list (+ .ids sidecar)");
  embed->callback([&] { embed->get_option("--output")->required(); });

  std::map<std::string, CLI::App*> evals;
  for (const char* name : {"eval-classify", "eval-cluster", "eval-linkpred"}) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + (name + 5) + " protocol");
    add_common(sub, cfg);
    add_model(sub, cfg);
    add_protocol(sub, cfg);
    sub->add_option("--labels", cfg.labels, "Label file (node_id label[,label...])");
    sub->add_option("--embedding", cfg.embedding, "Use this embedding instead of fitting one");
    evals[name] = sub;
  }

  auto* sweep = app.add_subcommand("sweep", "Grid sweep over alpha, beta, gamma, m and T");
  add_common(sweep, cfg);
  add_model(sweep, cfg);
  add_protocol(sweep, cfg);
  sweep->add_option("--labels", cfg.labels, "Label file");
  sweep->add_option("--task", cfg.task, "cluster, classify or linkpred")
      ->check(CLI::IsMember({"cluster", "classify", "linkpred"}));
  sweep->add_option("--alpha-grid", cfg.alpha_grid)->delimiter(',');
  sweep->add_option("--beta-grid", cfg.beta_grid)->delimiter(',');
  sweep->add_option("--gamma-grid", cfg.gamma_grid)->delimiter(',');
  sweep->add_option("--m-grid", cfg.m_grid)->delimiter(',');
  sweep->add_option("--window-grid", cfg.window_grid)->delimiter(',');
  sweep->add_option("--jobs", cfg.jobs, "Cells evaluated concurrently")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-sbm", "Generate a stochastic block model graph");
  add_common(gen, cfg, false);
  gen->add_option("--blocks", cfg.blocks, "Block sizes")->delimiter(',');
  gen->add_option("--p-in", cfg.p_in, "Intra-block edge probability");
  gen->add_option("--p-out", cfg.p_out, "Inter-block edge probability");
  gen->add_option("--labels", cfg.labels, "Write block labels here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (embed->parsed()) {
      cfg.command = "embed";
      return cmd_embed(cfg, out, err);
    }
    for (auto& [name, sub] : evals)
      if (sub->parsed()) {
        cfg.command = name;
        return cmd_eval(cfg, name.substr(5), out);
      }
    if (sweep->parsed()) {
      cfg.command = "sweep";
      const Graph g = load_graph(cfg);
      LabelSet labels;
      if (cfg.task != "linkpred") labels = load_label_file(cfg, g);
      const SweepResult r = run_sweep(g, cfg.task != "linkpred" ? &labels : nullptr, cfg);
      out << "sweep: cells=" << r.cells << " computed=" << r.computed << " skipped=" << r.skipped << '\n';
      return kExitOk;
    }
    if (gen->parsed()) {
      cfg.command = "gen-sbm";
      if (cfg.output.empty()) throw InputError("gen-sbm needs --output");
      return cmd_gen_sbm(cfg, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace lnlm::cli
