#include "gelato/scorer.hpp"

#include <algorithm>
#include <numeric>

#include "gelato/parallel.hpp"

namespace gelato {

std::vector<double> PairScorer::score_pairs(std::span<const NodePair> pairs,
                                            unsigned workers) const {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pairs[a].u < pairs[b].u; });
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || pairs[order[i]].u != pairs[order[i - 1]].u) starts.push_back(i);
  }
  starts.push_back(order.size());

  std::vector<double> out(pairs.size());
  const NodeId n = num_nodes();
  parallel_chunks(starts.size() - 1, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<double> row(n);
    for (std::size_t s = begin; s < end; ++s) {
      score_row(pairs[order[starts[s]]].u, row);
      for (std::size_t k = starts[s]; k < starts[s + 1]; ++k) {
        out[order[k]] = row[pairs[order[k]].v];
      }
    }
  });
  return out;
}

AutocovarianceScorer::AutocovarianceScorer(Graph g, AcParams params)
    : graph_(std::move(g)), ac_(std::make_unique<Autocovariance>(graph_, params)) {}

void MlpScorer::score_row(NodeId u, std::span<double> out) const {
  PairFeatures f;
  for (NodeId v = 0; v < num_nodes(); ++v) {
    if (v == u) {
      out[v] = 0.0;
      continue;
    }
    pair_features(*x_, {u, v}, f);
    out[v] = mlp_forward(params_, f, {}, 0);
  }
}

std::vector<double> MlpScorer::score_pairs(std::span<const NodePair> pairs,
                                           unsigned workers) const {
  std::vector<double> out(pairs.size());
  parallel_chunks(pairs.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    PairFeatures f;
    for (std::size_t i = begin; i < end; ++i) {
      if (pairs[i].u == pairs[i].v) {
        out[i] = 0.0;
        continue;
      }
      pair_features(*x_, pairs[i], f);
      out[i] = mlp_forward(params_, f, {}, 0);
    }
  });
  return out;
}

}  // namespace gelato
