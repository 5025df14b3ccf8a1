#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gelato/attributes.hpp"
#include "gelato/autocovariance.hpp"
#include "gelato/graph.hpp"
#include "gelato/local_heuristics.hpp"
#include "gelato/mlp.hpp"

namespace gelato {

// A total scoring function over node pairs, evaluated one source row at a
// time. Implementations must be safe to call concurrently.
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual NodeId num_nodes() const = 0;
  // out[v] = score(u, v) for every v; out.size() == num_nodes().
  virtual void score_row(NodeId u, std::span<double> out) const = 0;
  // Default groups pairs by p.u and calls score_row once per source.
  virtual std::vector<double> score_pairs(std::span<const NodePair> pairs,
                                          unsigned workers = 1) const;
};

class AutocovarianceScorer : public PairScorer {
 public:
  // Keeps its own copy of the graph.
  AutocovarianceScorer(Graph g, AcParams params);
  NodeId num_nodes() const override { return graph_.num_nodes(); }
  void score_row(NodeId u, std::span<double> out) const override { ac_->row(u, out); }
  std::vector<double> score_pairs(std::span<const NodePair> pairs,
                                  unsigned workers = 1) const override {
    return ac_->pairs(pairs, workers);
  }
  const Graph& graph() const { return graph_; }

 private:
  Graph graph_;
  std::unique_ptr<Autocovariance> ac_;
};

class LocalHeuristicScorer : public PairScorer {
 public:
  LocalHeuristicScorer(LocalHeuristic kind, Graph g) : kind_(kind), graph_(std::move(g)) {}
  NodeId num_nodes() const override { return graph_.num_nodes(); }
  void score_row(NodeId u, std::span<double> out) const override {
    local_heuristic_row(kind_, graph_, u, out);
  }

 private:
  LocalHeuristic kind_;
  Graph graph_;
};

class CosineScorer : public PairScorer {
 public:
  explicit CosineScorer(const AttributeMatrix& x) : x_(&x), index_(x) {}
  NodeId num_nodes() const override { return static_cast<NodeId>(x_->rows()); }
  void score_row(NodeId u, std::span<double> out) const override { index_.row(u, out); }

 private:
  const AttributeMatrix* x_;
  CosineIndex index_;
};

// MLP edge weight of each pair, evaluated without dropout. Self-pairs score 0.
class MlpScorer : public PairScorer {
 public:
  MlpScorer(const AttributeMatrix& x, MlpParams params) : x_(&x), params_(std::move(params)) {}
  NodeId num_nodes() const override { return static_cast<NodeId>(x_->rows()); }
  void score_row(NodeId u, std::span<double> out) const override;
  std::vector<double> score_pairs(std::span<const NodePair> pairs,
                                  unsigned workers = 1) const override;

 private:
  const AttributeMatrix* x_;
  MlpParams params_;
};

// Wraps an arbitrary pair function; used by tests and synthetic setups.
class FunctionScorer : public PairScorer {
 public:
  FunctionScorer(NodeId n, std::function<double(NodeId, NodeId)> fn) : n_(n), fn_(std::move(fn)) {}
  NodeId num_nodes() const override { return n_; }
  void score_row(NodeId u, std::span<double> out) const override {
    for (NodeId v = 0; v < n_; ++v) out[v] = fn_(u, v);
  }

 private:
  NodeId n_;
  std::function<double(NodeId, NodeId)> fn_;
};

}  // namespace gelato
