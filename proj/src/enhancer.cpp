#include "gelato/enhancer.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "gelato/errors.hpp"
#include "gelato/parallel.hpp"

namespace gelato {

void EnhancerConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  if (!(self_loop_weight > 0.0) || !std::isfinite(self_loop_weight)) {
    throw ConfigError("self-loop weight must be > 0");
  }
  if (hidden == 0) throw ConfigError("hidden width must be >= 1");
}

namespace {

struct Candidate {
  double score;
  NodePair pair;
};

// a ranks ahead of b
bool ahead(const Candidate& a, const Candidate& b) {
  return a.score > b.score || (a.score == b.score && a.pair < b.pair);
}

struct Behind {
  bool operator()(const Candidate& a, const Candidate& b) const { return ahead(a, b); }
};

// Top of the queue is the candidate ranked last.
using TopK = std::priority_queue<Candidate, std::vector<Candidate>, Behind>;

}  // namespace

Augmentation select_augmentation_pairs(const AttributeMatrix& x, const Graph& g, double eta,
                                       unsigned workers) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be >= 0");
  if (x.rows() != g.num_nodes()) throw DataError("attribute rows do not match node count");
  const std::size_t m = g.num_edges();
  const auto k = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(m) - 1e-9));
  Augmentation result;
  if (k == 0) return result;
  const std::uint64_t n = g.num_nodes();
  const std::uint64_t non_edges = n * (n - 1) / 2 - m;
  if (k > non_edges) {
    throw ConfigError("augmentation requests " + std::to_string(k) + " pairs but only " +
                      std::to_string(non_edges) + " non-edges exist");
  }

  const CosineIndex index(x);
  workers = std::max(1u, workers);
  std::vector<TopK> heaps(workers);
  parallel_chunks(g.num_nodes(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    TopK& heap = heaps[w];
    std::vector<double> row(g.num_nodes());
    for (std::size_t s = begin; s < end; ++s) {
      const auto u = static_cast<NodeId>(s);
      index.row(u, row);
      const auto nb = g.neighbors(u);
      auto it = std::upper_bound(nb.begin(), nb.end(), u);
      for (NodeId v = u + 1; v < g.num_nodes(); ++v) {
        while (it != nb.end() && *it < v) ++it;
        if (it != nb.end() && *it == v) continue;
        const Candidate c{row[v], {u, v}};
        if (heap.size() < k) {
          heap.push(c);
        } else if (ahead(c, heap.top())) {
          heap.pop();
          heap.push(c);
        }
      }
    }
  });

  std::vector<Candidate> all;
  for (TopK& heap : heaps) {
    while (!heap.empty()) {
      all.push_back(heap.top());
      heap.pop();
    }
  }
  std::sort(all.begin(), all.end(), ahead);
  all.resize(k);
  result.threshold = all.back().score;
  for (const Candidate& c : all) result.pairs.push_back(c.pair);
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

Graph structure_graph(const Graph& original, std::span<const NodePair> pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const NodePair& p : pairs) {
    const double w = original.has_arc(p.u, p.v) ? original.weight(p.u, p.v) : 1.0;
    edges.push_back({p.u, p.v, w});
  }
  return Graph::from_edges(original.num_nodes(), edges, true);
}

EnhancedGraph build_enhanced_graph(const Graph& structure, const AttributeMatrix& x,
                                   const MlpParams& params, const EnhancerConfig& cfg,
                                   std::span<const NodePair> added_pairs,
                                   const DropoutSpec& dropout, EnhancerTape* tape) {
  cfg.validate();
  if (x.rows() != structure.num_nodes()) throw DataError("attribute rows do not match node count");
  const bool use_mlp = cfg.has_trainable_weights();
  if (use_mlp && (params.attr_dim() != x.cols() || params.hidden() == 0)) {
    throw ConfigError("MLP parameters do not match the attribute dimension");
  }

  EnhancedGraph eg;
  const std::vector<NodePair> base = structure.canonical_pairs();
  std::set_union(base.begin(), base.end(), added_pairs.begin(), added_pairs.end(),
                 std::back_inserter(eg.pairs));
  eg.pairs.erase(std::unique(eg.pairs.begin(), eg.pairs.end()), eg.pairs.end());
  eg.num_added = eg.pairs.size() - base.size();

  const std::size_t np = eg.pairs.size();
  eg.topo.resize(np);
  eg.mlp.assign(np, 0.0);
  eg.cosine.resize(np);
  eg.weight.resize(np);
  eg.clamped.assign(np, 0);
  if (tape) {
    tape->features.assign(use_mlp ? np : 0, {});
    tape->activations.assign(use_mlp ? np : 0, {});
  }

  PairFeatures scratch;
  std::vector<Edge> edges;
  edges.reserve(np);
  for (std::size_t i = 0; i < np; ++i) {
    const NodePair p = eg.pairs[i];
    const double a = structure.weight(p.u, p.v);
    const double s = cosine_similarity(x, p);
    double w = 0.0;
    if (use_mlp) {
      PairFeatures& f = tape ? tape->features[i] : scratch;
      pair_features(x, p, f);
      w = mlp_forward(params, f, dropout, i, tape ? &tape->activations[i] : nullptr);
    }
    const double combined =
        cfg.alpha * a + (1.0 - cfg.alpha) * (cfg.beta * w + (1.0 - cfg.beta) * s);
    eg.topo[i] = a;
    eg.mlp[i] = w;
    eg.cosine[i] = s;
    eg.clamped[i] = combined < 0.0 ? 1 : 0;
    eg.weight[i] = std::max(combined, 0.0);
    if (eg.weight[i] > 0.0) edges.push_back({p.u, p.v, eg.weight[i]});
  }

  eg.graph = add_self_loops(Graph::from_edges(structure.num_nodes(), edges, true),
                            cfg.self_loop_mode, cfg.self_loop_weight);

  eg.arc_pair.assign(eg.graph.num_arcs(), EnhancedGraph::kNoPair);
  const auto offsets = eg.graph.offsets();
  const auto cols = eg.graph.columns();
  for (NodeId u = 0; u < eg.graph.num_nodes(); ++u) {
    for (std::size_t a = offsets[u]; a < offsets[u + 1]; ++a) {
      const NodeId v = cols[a];
      if (u == v) continue;
      const NodePair key = NodePair{u, v}.canonical();
      const auto it = std::lower_bound(eg.pairs.begin(), eg.pairs.end(), key);
      eg.arc_pair[a] = static_cast<std::size_t>(it - eg.pairs.begin());
    }
  }
  return eg;
}

}  // namespace gelato
