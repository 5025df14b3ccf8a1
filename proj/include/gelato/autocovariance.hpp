#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gelato/graph.hpp"

namespace gelato {

struct AcParams {
  unsigned t = 3;  // walk length
};

// Dense |sources| x n block of autocovariance rows.
struct ScoreBlock {
  std::vector<NodeId> sources;
  NodeId n = 0;
  std::vector<double> scores;

  std::span<const double> row(std::size_t i) const { return {scores.data() + i * n, n}; }
};

// Random-walk autocovariance on a weighted graph with transition matrix
// P = D^-1 A:
//
//   R = D / vol * P^t - d d^T / vol^2
//
// Row u is computed as t vector-times-sparse-matrix products starting from
// e_u, so R is never materialized. Every node must have positive degree
// (add self-loops first); otherwise construction throws DataError.
class Autocovariance {
 public:
  Autocovariance(CsrView graph, AcParams params);
  explicit Autocovariance(const Graph& g, AcParams params) : Autocovariance(g.view(), params) {}

  NodeId num_nodes() const { return csr_.n; }
  double volume() const { return volume_; }
  std::span<const double> degrees() const { return degrees_; }

  // out.size() == n
  void row(NodeId u, std::span<double> out) const;
  ScoreBlock rows(std::span<const NodeId> sources, unsigned workers = 1) const;

  // R[p.u][p.v] for each pair. Pairs are grouped by p.u and each distinct
  // source row is computed once.
  std::vector<double> pairs(std::span<const NodePair> pairs, unsigned workers = 1) const;

  // Reverse mode. Given dL/dR[p.u][p.v] for each pair, returns dL/dA for every
  // stored arc in CSR order, including the paths through the degrees and the
  // volume (both are sums of A). Arc weights are treated as independent
  // variables; callers tie symmetric arcs together.
  std::vector<double> pairs_vjp(std::span<const NodePair> pairs,
                                std::span<const double> pair_grads, unsigned workers = 1) const;

  // Number of distinct sources touched by the last pairs()/pairs_vjp() call.
  std::size_t last_source_count() const { return last_sources_; }

 private:
  // x_{k+1} = x_k P
  void step(std::span<const double> x, std::span<double> next) const;

  CsrView csr_;
  AcParams params_;
  std::vector<double> degrees_;
  double volume_ = 0.0;
  mutable std::size_t last_sources_ = 0;
};

inline ScoreBlock autocovariance_rows(const Graph& g, std::span<const NodeId> sources,
                                      AcParams params, unsigned workers = 1) {
  return Autocovariance(g, params).rows(sources, workers);
}

inline std::vector<double> autocovariance_pairs(const Graph& g, std::span<const NodePair> pairs,
                                                AcParams params, unsigned workers = 1) {
  return Autocovariance(g, params).pairs(pairs, workers);
}

}  // namespace gelato
