#include "gelato/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "gelato/adam.hpp"
#include "gelato/autocovariance.hpp"
#include "gelato/errors.hpp"
#include "gelato/metrics.hpp"
#include "gelato/rng.hpp"
#include "gelato/text_format.hpp"

namespace gelato {

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (batch_count == 0) throw ConfigError("batch_count must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (ac_t == 0) throw ConfigError("ac_t must be >= 1");
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_context(const TrainContext& ctx) {
  if (!ctx.original || !ctx.x || !ctx.split) throw ConfigError("training context is incomplete");
  if (ctx.x->rows() != ctx.original->num_nodes()) {
    throw DataError("attribute rows do not match node count");
  }
}

struct Forward {
  std::vector<NodePair> pairs;
  std::size_t num_positive = 0;
  std::vector<double> scores;
};

std::vector<NodePair> scored_pairs(const MaskedBatch& batch) {
  std::vector<NodePair> pairs(batch.batch_pos);
  pairs.insert(pairs.end(), batch.negatives.begin(), batch.negatives.end());
  return pairs;
}

// Loss over standardized scores; fills dL/dz when grad_z is non-empty.
double loss_of(const TrainConfig& cfg, const MaskedBatch& batch, std::span<const double> z,
               const BceHead& head, std::span<double> grad_z, std::span<double> head_grad) {
  const std::size_t np = batch.batch_pos.size();
  if (cfg.loss == LossKind::kNPair) {
    return npair_loss_flat(z.subspan(0, np), z.subspan(np), batch.neg_offsets,
                           grad_z.empty() ? grad_z : grad_z.subspan(0, np),
                           grad_z.empty() ? grad_z : grad_z.subspan(np));
  }
  std::vector<double> labels(z.size(), 0.0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(np), 1.0);
  return bce_loss_grad(z, labels, head, grad_z, head_grad);
}

}  // namespace

GradientResult compute_gradients(const TrainContext& ctx, const MlpParams& params,
                                 const BceHead& head, const TrainConfig& cfg,
                                 const MaskedBatch& batch, const DropoutSpec& dropout,
                                 Tape* tape) {
  check_context(ctx);
  Tape local;
  Tape& tp = tape ? *tape : local;
  tp = Tape{};
  tp.pairs = scored_pairs(batch);
  tp.num_positive = batch.batch_pos.size();

  GradientResult result;
  result.grads.assign(params.size(), 0.0);
  const std::size_t total = tp.pairs.size();

  std::unique_ptr<Autocovariance> ac;
  if (cfg.score_source == ScoreSource::kAutocovariance) {
    const Graph structure = structure_graph(*ctx.original, batch.residual_edges);
    tp.graph = build_enhanced_graph(structure, *ctx.x, params, ctx.enhancer, ctx.added_pairs,
                                    dropout, &tp.enhancer);
    ac = std::make_unique<Autocovariance>(tp.graph.graph, AcParams{cfg.ac_t});
    tp.scores = ac->pairs(tp.pairs, cfg.workers);
  } else {
    tp.direct_features.resize(total);
    tp.direct_activations.resize(total);
    tp.scores.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      pair_features(*ctx.x, tp.pairs[i], tp.direct_features[i]);
      tp.scores[i] = mlp_forward(params, tp.direct_features[i], dropout, i,
                                 &tp.direct_activations[i]);
    }
  }

  tp.standardized = standardize_scores(tp.scores);
  std::vector<double> grad_z(total, 0.0);
  tp.loss = loss_of(cfg, batch, tp.standardized, head, grad_z, result.head_grad);
  result.loss = tp.loss;
  if (!std::isfinite(result.loss) || !all_finite(tp.scores)) {
    result.valid = false;
    return result;
  }
  const std::vector<double> grad_s = standardize_backward(tp.scores, tp.standardized, grad_z);

  if (cfg.score_source == ScoreSource::kAutocovariance) {
    const EnhancedGraph& eg = tp.graph;
    if (ctx.enhancer.has_trainable_weights()) {
      const std::vector<double> arc_grad = ac->pairs_vjp(tp.pairs, grad_s, cfg.workers);
      // Both arcs of an undirected pair carry the same weight.
      std::vector<double> pair_grad(eg.pairs.size(), 0.0);
      for (std::size_t a = 0; a < arc_grad.size(); ++a) {
        if (eg.arc_pair[a] != EnhancedGraph::kNoPair) pair_grad[eg.arc_pair[a]] += arc_grad[a];
      }
      const double dw = (1.0 - ctx.enhancer.alpha) * ctx.enhancer.beta;
      for (std::size_t i = 0; i < eg.pairs.size(); ++i) {
        if (eg.clamped[i] || eg.weight[i] == 0.0 || pair_grad[i] == 0.0) continue;
        mlp_backward(params, tp.enhancer.features[i], tp.enhancer.activations[i],
                     pair_grad[i] * dw, result.grads);
      }
    }
  } else {
    for (std::size_t i = 0; i < total; ++i) {
      if (grad_s[i] == 0.0) continue;
      mlp_backward(params, tp.direct_features[i], tp.direct_activations[i], grad_s[i],
                   result.grads);
    }
  }

  result.valid = all_finite(result.grads) && all_finite(result.head_grad);
  return result;
}

double batch_loss(const TrainContext& ctx, const MlpParams& params, const BceHead& head,
                  const TrainConfig& cfg, const MaskedBatch& batch) {
  check_context(ctx);
  const std::vector<NodePair> pairs = scored_pairs(batch);
  std::vector<double> scores;
  if (cfg.score_source == ScoreSource::kAutocovariance) {
    const Graph structure = structure_graph(*ctx.original, batch.residual_edges);
    const EnhancedGraph eg =
        build_enhanced_graph(structure, *ctx.x, params, ctx.enhancer, ctx.added_pairs);
    scores = Autocovariance(eg.graph, AcParams{cfg.ac_t}).pairs(pairs, cfg.workers);
  } else {
    scores.reserve(pairs.size());
    for (const NodePair& p : pairs) scores.push_back(mlp_edge_weight(params, *ctx.x, p));
  }
  const std::vector<double> z = standardize_scores(scores);
  return loss_of(cfg, batch, z, head, {}, {});
}

std::size_t negatives_per_positive(const EdgeSplit& split, const TrainConfig& cfg) {
  if (cfg.regime == Regime::kBiased) return 1;
  const auto m = static_cast<double>(split.train_pos.size());
  const auto pool = static_cast<double>(negative_pool_size(split, Phase::kTrain));
  auto k = static_cast<std::size_t>(std::llround(pool / m));
  if (cfg.neg_cap > 0) k = std::min(k, cfg.neg_cap);
  return std::max<std::size_t>(k, 1);
}

Graph enhanced_graph_for(const TrainContext& ctx, const MlpParams& params,
                         std::span<const NodePair> observed) {
  check_context(ctx);
  const Graph structure = structure_graph(*ctx.original, observed);
  return build_enhanced_graph(structure, *ctx.x, params, ctx.enhancer, ctx.added_pairs).graph;
}

namespace {

std::vector<double> eval_scores(const TrainContext& ctx, const MlpParams& params,
                                const TrainConfig& cfg, const Graph* enhanced,
                                std::span<const NodePair> pairs) {
  if (cfg.score_source == ScoreSource::kAutocovariance) {
    return Autocovariance(*enhanced, AcParams{cfg.ac_t}).pairs(pairs, cfg.workers);
  }
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const NodePair& p : pairs) out.push_back(mlp_edge_weight(params, *ctx.x, p));
  return out;
}

double validation_precision(const TrainContext& ctx, const MlpParams& params,
                            const TrainConfig& cfg, std::span<const NodePair> negatives) {
  const EdgeSplit& split = *ctx.split;
  if (split.valid_pos.empty()) return 0.0;
  Graph enhanced;
  if (cfg.score_source == ScoreSource::kAutocovariance) {
    enhanced = enhanced_graph_for(ctx, params, split.train_pos);
  }
  const std::vector<double> pos = eval_scores(ctx, params, cfg, &enhanced, split.valid_pos);
  const std::vector<double> neg = eval_scores(ctx, params, cfg, &enhanced, negatives);
  if (!all_finite(pos) || !all_finite(neg)) return 0.0;
  return precision_at_k(summarize_scores(pos, neg), 1.0);
}

}  // namespace

TrainResult train(const TrainContext& ctx, const MlpParams& init, const TrainConfig& cfg) {
  check_context(ctx);
  cfg.validate();
  ctx.enhancer.validate();
  if (cfg.score_source == ScoreSource::kAutocovariance && !ctx.enhancer.has_trainable_weights()) {
    throw ConfigError("no trainable parameters: alpha = 1 or beta = 0 leaves the MLP unused");
  }
  if (init.attr_dim() != ctx.x->cols() || init.hidden() == 0) {
    throw ConfigError("initial MLP parameters do not match the attribute dimension");
  }
  const EdgeSplit& split = *ctx.split;

  const std::size_t k = negatives_per_positive(split, cfg);
  const NegativePool train_pool(split, Phase::kTrain);
  std::vector<NodePair> valid_negatives;
  if (!split.valid_pos.empty()) {
    const NegativePool valid_pool(split, Phase::kValid);
    std::uint64_t count = valid_pool.size();
    if (cfg.valid_neg_sample > 0) count = std::min(count, cfg.valid_neg_sample);
    valid_negatives = valid_pool.sample(count, derive_key(cfg.seed, {rng_tag::kValidSample}));
  }

  MlpParams params = init;
  BceHead head;
  AdamState adam(params.size());
  AdamState head_adam(2);

  TrainResult result;
  result.best = params;
  bool have_best = false;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<MaskedBatch> batches =
        positive_masking_batches(split, cfg.batch_count, derive_key(cfg.seed, {epoch}));
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t loss_den = 0;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      MaskedBatch& batch = batches[b];
      const std::size_t np = batch.batch_pos.size();
      const std::size_t want = std::min<std::uint64_t>(k * np, train_pool.size());
      const std::size_t per = want / np;
      batch.negatives = train_pool.sample(
          per * np, derive_key(cfg.seed, {rng_tag::kNegatives, epoch, b}));
      batch.neg_offsets.resize(np + 1);
      for (std::size_t i = 0; i <= np; ++i) batch.neg_offsets[i] = i * per;

      DropoutSpec dropout;
      dropout.active = cfg.dropout > 0.0;
      dropout.rate = cfg.dropout;
      dropout.key = derive_key(cfg.seed, {rng_tag::kDropout, epoch, b});

      const GradientResult g = compute_gradients(ctx, params, head, cfg, batch, dropout);
      if (!g.valid) {
        ++rec.skipped;
        continue;
      }
      adam_update(adam, params.values(), g.grads, cfg.lr);
      if (cfg.loss == LossKind::kBce) {
        std::array<double, 2> hv{head.a, head.b};
        adam_update(head_adam, hv, g.head_grad, cfg.lr);
        head.a = hv[0];
        head.b = hv[1];
      }
      if (cfg.loss == LossKind::kNPair) {
        loss_sum += g.loss;
        loss_den += np;
      } else {
        loss_sum += g.loss;
        loss_den += 1;
      }
    }

    rec.train_loss = loss_den > 0 ? loss_sum / static_cast<double>(loss_den) : 0.0;
    rec.valid_prec = validation_precision(ctx, params, cfg, valid_negatives);
    result.total_skipped += rec.skipped;
    result.history.push_back(rec);

    // prec@100% over a small validation set ties often; the latest of the
    // tied epochs wins.
    if (!have_best || rec.valid_prec >= result.best_valid_prec) {
      have_best = true;
      result.best = params;
      result.best_epoch = epoch;
      result.best_valid_prec = rec.valid_prec;
    }
  }
  return result;
}

void write_history(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "# epoch loss valid_prec skipped\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ' ' << text::format_double(r.train_loss) << ' '
        << text::format_double(r.valid_prec) << ' ' << r.skipped << '\n';
  }
}

}  // namespace gelato
