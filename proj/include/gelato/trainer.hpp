#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "gelato/attributes.hpp"
#include "gelato/enhancer.hpp"
#include "gelato/graph.hpp"
#include "gelato/losses.hpp"
#include "gelato/mlp.hpp"
#include "gelato/split.hpp"

namespace gelato {

enum class LossKind { kNPair, kBce };
enum class Regime { kUnbiased, kBiased };
// What the loss sees: autocovariance on the enhanced graph (end-to-end), or
// the MLP edge weight of each pair directly (the "MLP" baseline and the first
// stage of the two-stage baselines).
enum class ScoreSource { kAutocovariance, kMlpDirect };

struct TrainConfig {
  LossKind loss = LossKind::kNPair;
  Regime regime = Regime::kUnbiased;
  ScoreSource score_source = ScoreSource::kAutocovariance;
  double lr = 0.001;
  std::size_t epochs = 100;
  std::size_t batch_count = 10;
  std::size_t neg_cap = 1000;  // max negatives per positive (0 = no cap)
  std::uint64_t seed = 0;
  double dropout = 0.5;
  unsigned ac_t = 3;
  std::uint64_t valid_neg_sample = 1'000'000;  // 0 = full validation pool
  unsigned workers = 1;

  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

// Fixed inputs of one training run.
struct TrainContext {
  const Graph* original = nullptr;  // full input graph (edge weights)
  const AttributeMatrix* x = nullptr;
  const EdgeSplit* split = nullptr;
  EnhancerConfig enhancer;
  std::vector<NodePair> added_pairs;  // frozen augmentation
};

// Forward record of one batch: enhanced graph, MLP activations, scored
// pairs, raw scores, standardized scores and loss. Walk vectors of the
// autocovariance are recomputed during the backward sweep instead of stored.
struct Tape {
  EnhancedGraph graph;
  EnhancerTape enhancer;
  std::vector<PairFeatures> direct_features;  // kMlpDirect only
  std::vector<MlpActivation> direct_activations;
  std::vector<NodePair> pairs;  // batch positives, then negatives
  std::size_t num_positive = 0;
  std::vector<double> scores;
  std::vector<double> standardized;
  double loss = 0.0;
};

struct GradientResult {
  bool valid = true;  // false when the loss or any gradient entry is not finite
  double loss = 0.0;
  std::vector<double> grads;        // same layout as MlpParams::values()
  std::array<double, 2> head_grad{};  // BCE head (a, b)
};

// Loss and gradient of one masked batch with respect to the MLP parameters
// (and the BCE head). The enhanced graph is built from the batch's residual
// edges plus the frozen augmentation; degrees and volume are functions of the
// enhanced weights and are differentiated through.
GradientResult compute_gradients(const TrainContext& ctx, const MlpParams& params,
                                 const BceHead& head, const TrainConfig& cfg,
                                 const MaskedBatch& batch, const DropoutSpec& dropout = {},
                                 Tape* tape = nullptr);

// Loss only (no backward sweep); used for finite-difference checks.
double batch_loss(const TrainContext& ctx, const MlpParams& params, const BceHead& head,
                  const TrainConfig& cfg, const MaskedBatch& batch);

// Negatives per positive in one epoch: round(train pool / |train_pos|)
// capped by neg_cap (unbiased), or exactly 1 (biased).
std::size_t negatives_per_positive(const EdgeSplit& split, const TrainConfig& cfg);

// Enhanced graph of `params` on the observed edges plus the augmentation, in
// evaluation mode (no dropout).
Graph enhanced_graph_for(const TrainContext& ctx, const MlpParams& params,
                         std::span<const NodePair> observed);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per positive over applied batches
  double valid_prec = 0.0;  // prec@100% on the validation sample
  std::size_t skipped = 0;  // batches with invalid gradients
};

struct TrainResult {
  MlpParams best;
  std::size_t best_epoch = 0;
  double best_valid_prec = 0.0;
  std::vector<EpochRecord> history;
  std::size_t total_skipped = 0;
};

// Adam over masked batches; after every epoch the model is evaluated on the
// validation positives against a fixed-seed sample of the validation pool
// and the parameters of the best epoch (highest prec@100%, latest on ties)
// are returned. Throws ConfigError when the configuration leaves nothing to
// train.
TrainResult train(const TrainContext& ctx, const MlpParams& init, const TrainConfig& cfg);

// Line-oriented log: "epoch loss valid_prec skipped".
void write_history(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace gelato
