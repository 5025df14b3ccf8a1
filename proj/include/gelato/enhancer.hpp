#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "gelato/attributes.hpp"
#include "gelato/graph.hpp"
#include "gelato/mlp.hpp"

namespace gelato {

struct EnhancerConfig {
  double eta = 0.5;    // augmentation ratio: ceil(eta * m) pairs are added
  double alpha = 0.5;  // weight of the input topology
  double beta = 0.25;  // weight of the trained MLP weights within the rest
  SelfLoopMode self_loop_mode = SelfLoopMode::kAll;
  double self_loop_weight = 1.0;
  std::size_t hidden = 128;

  // Throws ConfigError when a field is out of range.
  void validate() const;
  // False when the enhanced weights cannot depend on the MLP.
  bool has_trainable_weights() const { return alpha < 1.0 && beta > 0.0; }

  bool operator==(const EnhancerConfig&) const = default;
};

struct Augmentation {
  std::vector<NodePair> pairs;  // canonical, ascending
  double threshold = std::numeric_limits<double>::infinity();  // smallest selected cosine
};

// The ceil(eta * m) non-edge, non-self pairs of g with the highest attribute
// cosine; ties go to the lexicographically smaller canonical pair. Cosine
// rows are produced one source at a time and fed into a bounded heap, so the
// n x n similarity matrix is never held. Throws ConfigError when eta < 0 or
// more pairs are requested than g has non-edges.
Augmentation select_augmentation_pairs(const AttributeMatrix& x, const Graph& g, double eta,
                                       unsigned workers = 1);

// Graph on `pairs` with the weights they carry in `original` (1.0 if absent).
Graph structure_graph(const Graph& original, std::span<const NodePair> pairs);

// The learned graph fed to the topological heuristic. For each canonical
// pair of E + added pairs:
//
//   combined = alpha * A_uv + (1 - alpha) * (beta * w_uv + (1 - beta) * cos_uv)
//   weight   = max(combined, 0)
//
// Pairs with weight 0 are left out of `graph`; self-loops are then added per
// the configuration.
struct EnhancedGraph {
  Graph graph;
  std::vector<NodePair> pairs;       // canonical, ascending
  std::vector<double> topo;          // A_uv
  std::vector<double> mlp;           // w_uv (0 when not computed)
  std::vector<double> cosine;        // cos_uv
  std::vector<double> weight;        // final clamped weight
  std::vector<unsigned char> clamped;
  // arc_pair[a] = index into pairs of graph arc a, kNoPair for self-loops.
  std::vector<std::size_t> arc_pair;
  std::size_t num_added = 0;  // pairs not present in the structure

  static constexpr std::size_t kNoPair = std::numeric_limits<std::size_t>::max();
};

// Forward record of the MLP evaluations, one per EnhancedGraph pair.
struct EnhancerTape {
  std::vector<PairFeatures> features;
  std::vector<MlpActivation> activations;
};

// `structure` carries A. Dropout slot of a pair is its index in
// EnhancedGraph::pairs. The MLP is evaluated only when cfg has trainable
// weights.
EnhancedGraph build_enhanced_graph(const Graph& structure, const AttributeMatrix& x,
                                   const MlpParams& params, const EnhancerConfig& cfg,
                                   std::span<const NodePair> added_pairs,
                                   const DropoutSpec& dropout = {}, EnhancerTape* tape = nullptr);

}  // namespace gelato
