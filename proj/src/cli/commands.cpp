#include "gelato/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include "gelato/enhancer.hpp"
#include "gelato/errors.hpp"
#include "gelato/evaluator.hpp"
#include "gelato/graph_io.hpp"
#include "gelato/parallel.hpp"
#include "gelato/text_format.hpp"
#include "gelato/trainer.hpp"

namespace gelato::cli {

namespace {

unsigned resolved_workers(const ExperimentConfig& cfg) {
  return cfg.workers > 0 ? cfg.workers : default_workers();
}

const std::string& require_path(const std::string& path, const char* key) {
  if (path.empty()) throw ConfigError(std::string("missing required setting: ") + key);
  return path;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

// Writes to `path`, or to `fallback` when path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f = open_output(path);
  fn(f);
  if (!f) throw DataError("failed writing " + path);
}

Graph load_graph(const ExperimentConfig& cfg) {
  Graph g = read_edge_list(std::filesystem::path(require_path(cfg.edges, "edges")), true);
  return g;
}

EdgeSplit load_split(const ExperimentConfig& cfg, const Graph& g) {
  const std::string& path = require_path(cfg.split_file, "split");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file " + path);
  EdgeSplit split = read_split(in);
  validate_split(g, split);
  return split;
}

AttributeMatrix load_attrs(const ExperimentConfig& cfg, const Graph& g) {
  AttributeMatrix x = read_attributes(require_path(cfg.attributes, "attributes"));
  if (x.rows() != g.num_nodes()) {
    throw DataError("attribute file has " + std::to_string(x.rows()) + " rows, graph has " +
                    std::to_string(g.num_nodes()) + " nodes");
  }
  return x;
}

std::vector<NodePair> observed_edges(const EdgeSplit& split, Phase phase) {
  if (phase != Phase::kTest) return split.train_pos;
  std::vector<NodePair> out;
  std::merge(split.train_pos.begin(), split.train_pos.end(), split.valid_pos.begin(),
             split.valid_pos.end(), std::back_inserter(out));
  return out;
}

EnhancerConfig effective_enhancer(const ExperimentConfig& cfg) {
  EnhancerConfig enh = cfg.enhancer;
  if (cfg.mode == Mode::kCosAc) enh.beta = 0.0;
  return enh;
}

TrainConfig effective_trainer(const ExperimentConfig& cfg) {
  TrainConfig tc = cfg.trainer;
  tc.workers = resolved_workers(cfg);
  tc.score_source = cfg.mode == Mode::kGelato ? ScoreSource::kAutocovariance
                                              : ScoreSource::kMlpDirect;
  return tc;
}

// Augmentation is chosen once from the training graph and shared by
// training and every evaluation phase.
std::vector<NodePair> augmentation(const ExperimentConfig& cfg, const Graph& g,
                                   const EdgeSplit& split, const AttributeMatrix& x) {
  const Graph train_graph = structure_graph(g, split.train_pos);
  return select_augmentation_pairs(x, train_graph, cfg.enhancer.eta, resolved_workers(cfg)).pairs;
}

MlpParams load_params(const ExperimentConfig& cfg, const AttributeMatrix& x) {
  const std::string& path = cfg.checkpoint;
  if (path.empty()) throw ConfigError("mode " + mode_name(cfg) + " needs a checkpoint");
  if (!std::filesystem::exists(path)) throw ConfigError("checkpoint not found: " + path);
  MlpParams params = load_checkpoint(path);
  if (params.attr_dim() != x.cols()) {
    throw DataError("checkpoint attribute dimension does not match the attribute file");
  }
  return params;
}

LocalHeuristic local_kind(HeuristicKind h) {
  switch (h) {
    case HeuristicKind::kAa: return LocalHeuristic::kAdamicAdar;
    case HeuristicKind::kRa: return LocalHeuristic::kResourceAllocation;
    default: return LocalHeuristic::kCommonNeighbors;
  }
}

void check_phase(const EdgeSplit& split, Phase phase) {
  if (split.positives(phase).empty()) {
    throw DataError(std::string("split has no ") + phase_name(phase) + " positives");
  }
}

}  // namespace

Model build_model(const ExperimentConfig& cfg, const Graph& g, const EdgeSplit& split) {
  const std::vector<NodePair> observed = observed_edges(split, cfg.eval_phase);
  const AcParams ac{cfg.trainer.ac_t};
  Model model;

  if (cfg.mode == Mode::kHeuristic && cfg.heuristic != HeuristicKind::kCos) {
    Graph structure = structure_graph(g, observed);
    model.scorer = std::make_unique<LocalHeuristicScorer>(local_kind(cfg.heuristic), structure);
    model.graph = std::move(structure);
    return model;
  }
  if (cfg.mode == Mode::kAcOnly) {
    Graph structure = add_self_loops(structure_graph(g, observed), cfg.enhancer.self_loop_mode,
                                     cfg.enhancer.self_loop_weight);
    model.scorer = std::make_unique<AutocovarianceScorer>(structure, ac);
    model.graph = std::move(structure);
    return model;
  }

  // Remaining modes read attributes; the scorer keeps a pointer to them, so
  // they live in a holder owned by the scorer.
  struct AttrHolder {
    AttributeMatrix x;
  };
  auto holder = std::make_shared<AttrHolder>(AttrHolder{load_attrs(cfg, g)});
  const AttributeMatrix& x = holder->x;

  class Owning : public PairScorer {
   public:
    Owning(std::shared_ptr<AttrHolder> h, std::unique_ptr<PairScorer> inner)
        : h_(std::move(h)), inner_(std::move(inner)) {}
    NodeId num_nodes() const override { return inner_->num_nodes(); }
    void score_row(NodeId u, std::span<double> out) const override { inner_->score_row(u, out); }
    std::vector<double> score_pairs(std::span<const NodePair> pairs,
                                    unsigned workers) const override {
      return inner_->score_pairs(pairs, workers);
    }

   private:
    std::shared_ptr<AttrHolder> h_;
    std::unique_ptr<PairScorer> inner_;
  };

  std::unique_ptr<PairScorer> inner;
  if (cfg.mode == Mode::kHeuristic) {
    inner = std::make_unique<CosineScorer>(x);
  } else if (cfg.mode == Mode::kMlpOnly) {
    inner = std::make_unique<MlpScorer>(x, load_params(cfg, x));
  } else {
    TrainContext ctx;
    ctx.original = &g;
    ctx.x = &x;
    ctx.split = &split;
    ctx.enhancer = effective_enhancer(cfg);
    ctx.enhancer.validate();
    ctx.added_pairs = augmentation(cfg, g, split, x);
    const MlpParams params =
        ctx.enhancer.has_trainable_weights() ? load_params(cfg, x) : MlpParams();
    Graph enhanced = enhanced_graph_for(ctx, params, observed);
    inner = std::make_unique<AutocovarianceScorer>(enhanced, ac);
    model.graph = std::move(enhanced);
  }
  model.scorer = std::make_unique<Owning>(holder, std::move(inner));
  return model;
}

int cmd_split(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
  const Graph g = load_graph(cfg);
  const EdgeSplit split = split_edges(g, cfg.ratios, cfg.split_seed);
  emit(require_path(cfg.split_file, "split"), out, [&](std::ostream& o) { write_split(o, split); });
  out << "nodes " << g.num_nodes() << '\n';
  out << "edges " << split.num_edges() << '\n';
  out << "train " << split.train_pos.size() << '\n';
  out << "valid " << split.valid_pos.size() << '\n';
  out << "test " << split.test_pos.size() << '\n';
  out << "pool_train " << negative_pool_size(split, Phase::kTrain) << '\n';
  out << "pool_valid " << negative_pool_size(split, Phase::kValid) << '\n';
  out << "pool_test " << negative_pool_size(split, Phase::kTest) << '\n';
  return kExitOk;
}

int cmd_train(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!mode_is_trained(cfg.mode)) {
    out << "mode " << mode_name(cfg) << " has no trainable parameters; no checkpoint written\n";
    return kExitOk;
  }
  const auto start = std::chrono::steady_clock::now();
  const Graph g = load_graph(cfg);
  const EdgeSplit split = load_split(cfg, g);
  const AttributeMatrix x = load_attrs(cfg, g);
  const TrainConfig tc = effective_trainer(cfg);
  tc.validate();
  require_path(cfg.checkpoint, "checkpoint");

  TrainContext ctx;
  ctx.original = &g;
  ctx.x = &x;
  ctx.split = &split;
  ctx.enhancer = effective_enhancer(cfg);
  ctx.enhancer.validate();
  if (tc.score_source == ScoreSource::kAutocovariance) {
    ctx.added_pairs = augmentation(cfg, g, split, x);
  }

  const MlpParams init = MlpParams::init_uniform(x.cols(), cfg.enhancer.hidden, tc.seed);
  const TrainResult result = train(ctx, init, tc);
  save_checkpoint(cfg.checkpoint, result.best);
  emit(cfg.history, out, [&](std::ostream& o) { write_history(o, result.history); });

  out << "mode " << mode_name(cfg) << '\n';
  out << "epochs " << result.history.size() << '\n';
  out << "best_epoch " << result.best_epoch << '\n';
  out << "best_valid_prec " << text::format_double(result.best_valid_prec) << '\n';
  out << "skipped_batches " << result.total_skipped << '\n';
  const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
  err << "train_seconds " << secs.count() << '\n';
  return kExitOk;
}

int cmd_eval(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Graph g = load_graph(cfg);
  const EdgeSplit split = load_split(cfg, g);
  check_phase(split, cfg.eval_phase);
  const Model model = build_model(cfg, g, split);
  const unsigned workers = resolved_workers(cfg);

  MetricsReport report;
  if (cfg.biased_neg_per_pos > 0) {
    err << "WARNING: BIASED evaluation with " << cfg.biased_neg_per_pos
        << " sampled negative(s) per positive; not comparable to unbiased results\n";
    report = biased_sample_metrics(*model.scorer, split, cfg.eval_phase, cfg.biased_neg_per_pos,
                                   cfg.eval_seed, cfg.prec, cfg.hits, workers);
  } else {
    report = compute_metrics(rank_summary(*model.scorer, split, cfg.eval_phase, workers),
                             cfg.prec, cfg.hits);
    report.phase = phase_name(cfg.eval_phase);
  }
  emit(cfg.report, out, [&](std::ostream& o) {
    o << "mode " << mode_name(cfg) << '\n';
    write_report(o, report);
  });
  if (!cfg.pr_csv.empty()) {
    emit(cfg.pr_csv, out, [&](std::ostream& o) { write_pr_csv(o, report); });
  }
  const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
  err << "eval_seconds " << secs.count() << '\n';
  return kExitOk;
}

int cmd_baseline(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (mode_is_trained(cfg.mode)) {
    throw ConfigError("baseline runs untrained modes only (ac-only, cos-ac, heuristic:*); got " +
                      mode_name(cfg));
  }
  return cmd_eval(cfg, out, err);
}

int cmd_export_scores(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.export_nodes.empty()) throw ConfigError("export_nodes is empty");
  if (cfg.export_nodes.size() > cfg.export_max_nodes) {
    throw ConfigError("node subset too large: " + std::to_string(cfg.export_nodes.size()) +
                      " > export_max_nodes " + std::to_string(cfg.export_max_nodes));
  }
  const Graph g = load_graph(cfg);
  for (NodeId u : cfg.export_nodes) {
    if (u >= g.num_nodes()) throw DataError("export node " + std::to_string(u) + " out of range");
  }
  const EdgeSplit split = load_split(cfg, g);
  const Model model = build_model(cfg, g, split);
  const NodeId n = g.num_nodes();

  emit(cfg.scores_csv, out, [&](std::ostream& o) {
    std::vector<double> row(n);
    for (NodeId u : cfg.export_nodes) {
      model.scorer->score_row(u, row);
      for (NodeId v = 0; v < n; ++v) {
        if (v) o << ',';
        o << text::format_double(row[v]);
      }
      o << '\n';
    }
  });
  if (!cfg.weights_csv.empty()) {
    if (!model.graph) throw ConfigError("mode " + mode_name(cfg) + " has no weighted graph");
    emit(cfg.weights_csv, out, [&](std::ostream& o) {
      o << "u,v,weight\n";
      for (NodeId u : cfg.export_nodes) {
        const auto nbrs = model.graph->neighbors(u);
        const auto ws = model.graph->neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
          o << u << ',' << nbrs[i] << ',' << text::format_double(ws[i]) << '\n';
        }
      }
    });
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gelato: graph link prediction toolkit"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string dump_config;
  app.add_option("-c,--config", config_path, "config file of 'key = value' lines");
  app.add_option("--write-config", dump_config, "write the effective config to this file");

  std::map<std::string, std::vector<std::string>> overrides;
  const std::vector<std::string> list_keys{"prec", "hits", "export_nodes"};
  for (const std::string& key : config_keys()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const bool is_list =
        std::find(list_keys.begin(), list_keys.end(), key) != list_keys.end();
    auto* opt = app.add_option(flag, overrides[key], "config key " + key);
    if (is_list) {
      opt->expected(1, CLI::detail::expected_max_vector_size);
    } else {
      opt->expected(1);
    }
  }
  auto* split_cmd = app.add_subcommand("split", "split edges into train/valid/test");
  auto* train_cmd = app.add_subcommand("train", "train and write the best checkpoint");
  auto* eval_cmd = app.add_subcommand("eval", "rank a phase's positives against its pool");
  auto* base_cmd = app.add_subcommand("baseline", "evaluate an untrained baseline mode");
  auto* export_cmd = app.add_subcommand("export-scores", "dump score rows for a node subset");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const std::string& key : config_keys()) {
      const auto& vals = overrides[key];
      if (vals.empty()) continue;
      std::string joined;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) joined += ' ';
        joined += vals[i];
      }
      set_config_value(cfg, key, joined);
    }
    if (!dump_config.empty()) emit(dump_config, out, [&](std::ostream& o) { write_config(o, cfg); });

    if (*split_cmd) return cmd_split(cfg, out, err);
    if (*train_cmd) return cmd_train(cfg, out, err);
    if (*eval_cmd) return cmd_eval(cfg, out, err);
    if (*base_cmd) return cmd_baseline(cfg, out, err);
    if (*export_cmd) return cmd_export_scores(cfg, out, err);
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace gelato::cli
