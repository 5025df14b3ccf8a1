#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_set>
#include <vector>

#include "gelato/graph.hpp"

namespace gelato {

enum class Phase { kTrain, kValid, kTest };

const char* phase_name(Phase phase);

struct SplitRatios {
  double train = 0.85;
  double valid = 0.05;
  double test = 0.10;

  bool operator==(const SplitRatios&) const = default;
};

// Positive edges partitioned into train/valid/test. Negative pools are never
// materialized; they are defined relative to the original graph's non-edges
// E- (self-pairs excluded):
//   train: E- + valid_pos + test_pos
//   valid: E- + test_pos
//   test:  E-
struct EdgeSplit {
  std::uint64_t seed = 0;
  SplitRatios ratios;
  NodeId num_nodes = 0;
  std::vector<NodePair> train_pos;  // canonical, ascending
  std::vector<NodePair> valid_pos;
  std::vector<NodePair> test_pos;

  const std::vector<NodePair>& positives(Phase phase) const;
  std::size_t num_edges() const { return train_pos.size() + valid_pos.size() + test_pos.size(); }
};

// Shuffles the canonical edges with stream (seed, split), then takes
// floor(valid * m) for validation, floor(test * m) for testing and the
// remainder for training. Self-loops of g are not prediction targets and are
// ignored. Throws ConfigError for invalid ratios and DataError when g is
// directed, m < 3 or the test set would be empty.
EdgeSplit split_edges(const Graph& g, SplitRatios ratios, std::uint64_t seed);

// |pool(phase)|: C(n,2) - m, plus |test_pos| for valid, plus |valid_pos| for train.
std::uint64_t negative_pool_size(const EdgeSplit& split, Phase phase);

// Set of canonical pairs keyed by NodePair::key().
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::span<const NodePair> pairs) { insert(pairs); }
  void insert(std::span<const NodePair> pairs) {
    for (const NodePair& p : pairs) keys_.insert(p.key());
  }
  bool insert(NodePair p) { return keys_.insert(p.key()).second; }
  bool contains(NodePair p) const { return keys_.contains(p.key()); }
  std::size_t size() const { return keys_.size(); }
  void reserve(std::size_t n) { keys_.reserve(n); }

 private:
  std::unordered_set<std::uint64_t> keys_;
};

// The negative pool of one phase, for membership tests and uniform sampling
// without replacement.
class NegativePool {
 public:
  NegativePool(const EdgeSplit& split, Phase phase);

  std::uint64_t size() const { return size_; }
  bool contains(NodePair p) const;

  // `count` distinct canonical pairs, uniform without replacement from the
  // pool, drawn from the stream `key`. Rejection sampling against the
  // excluded positives; when count exceeds half of a small pool the pool is
  // enumerated and partially shuffled instead. Throws ConfigError when
  // count > size().
  std::vector<NodePair> sample(std::uint64_t count, std::uint64_t key) const;

 private:
  NodeId n_;
  std::uint64_t size_;
  PairSet excluded_;
};

std::vector<NodePair> sample_negatives(const EdgeSplit& split, Phase phase, std::uint64_t count,
                                       std::uint64_t seed);

// One positive-masking batch. The batch positives are scored on a structure
// built from residual_edges = train_pos \ batch_pos. Negatives for
// batch_pos[i] are negatives[neg_offsets[i] .. neg_offsets[i+1]).
struct MaskedBatch {
  std::vector<NodePair> batch_pos;
  std::vector<NodePair> residual_edges;
  std::vector<NodePair> negatives;
  std::vector<std::size_t> neg_offsets;

  std::span<const NodePair> negatives_of(std::size_t i) const {
    if (neg_offsets.empty()) return {};
    return {negatives.data() + neg_offsets[i], neg_offsets[i + 1] - neg_offsets[i]};
  }
};

// Shuffles train_pos with stream (seed, batches) and cuts it into
// batch_count near-equal parts. Throws ConfigError when batch_count is 0,
// exceeds |train_pos|, or would leave an empty residual structure.
std::vector<MaskedBatch> positive_masking_batches(const EdgeSplit& split, std::size_t batch_count,
                                                  std::uint64_t seed);

// Text format:
//   # gelato edge split
//   seed <u64>
//   ratios <train> <valid> <test>
//   nodes <n>
//   TRAIN <count>   followed by <count> lines "u v" (canonical, ascending)
//   VALID <count>   ...
//   TEST <count>    ...
void write_split(std::ostream& out, const EdgeSplit& split);
EdgeSplit read_split(std::istream& in);

// Throws DataError unless split is a partition of g's canonical edges.
void validate_split(const Graph& g, const EdgeSplit& split);

}  // namespace gelato
