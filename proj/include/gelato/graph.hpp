#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gelato {

using NodeId = std::uint32_t;

// An unordered candidate pair. Canonical form has u < v.
struct NodePair {
  NodeId u = 0;
  NodeId v = 0;

  NodePair canonical() const { return u < v ? NodePair{u, v} : NodePair{v, u}; }
  std::uint64_t key() const {
    const NodePair c = canonical();
    return (static_cast<std::uint64_t>(c.u) << 32) | c.v;
  }
  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

// Non-owning row-compressed adjacency. Rows are sorted by column id.
struct CsrView {
  NodeId n = 0;
  std::span<const std::size_t> offsets;  // n + 1
  std::span<const NodeId> columns;
  std::span<const double> weights;
};

// Immutable weighted adjacency in compressed row form. Undirected graphs
// store both (u, v) and (v, u); a self-loop is stored once.
class Graph {
 public:
  Graph() = default;

  // Throws DataError on out-of-range ids, negative or non-finite weights and
  // duplicate entries. For undirected graphs (u, v) and (v, u) are the same
  // entry.
  static Graph from_edges(NodeId n, std::span<const Edge> edges, bool undirected);

  NodeId num_nodes() const { return n_; }
  std::size_t num_arcs() const { return columns_.size(); }
  bool undirected() const { return undirected_; }

  // Number of canonical non-self pairs (undirected) or non-self arcs (directed).
  std::size_t num_edges() const { return num_edges_; }
  std::size_t num_self_loops() const { return num_self_loops_; }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const NodeId> columns() const { return columns_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> degrees() const { return degrees_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {columns_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::span<const double> neighbor_weights(NodeId u) const {
    return {weights_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  double degree(NodeId u) const { return degrees_[u]; }
  double volume() const { return volume_; }

  // Stored weight of (u, v), 0 when absent.
  double weight(NodeId u, NodeId v) const;
  bool has_arc(NodeId u, NodeId v) const;

  // Canonical (u < v) pairs of stored non-self edges in ascending order.
  std::vector<NodePair> canonical_pairs() const;
  // Same order as canonical_pairs(), with weights.
  std::vector<Edge> edge_list() const;

  CsrView view() const { return {n_, offsets_, columns_, weights_}; }

 private:
  NodeId n_ = 0;
  bool undirected_ = true;
  std::size_t num_edges_ = 0;
  std::size_t num_self_loops_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> columns_;
  std::vector<double> weights_;
  std::vector<double> degrees_;
  double volume_ = 0.0;
};

inline Graph build_graph(std::span<const Edge> edges, NodeId n, bool undirected) {
  return Graph::from_edges(n, edges, undirected);
}

enum class SelfLoopMode { kAll, kIsolatedOnly };

// mode kAll adds (u, u, weight) to every node, kIsolatedOnly only to nodes
// with zero degree. Existing self-loops are incremented by weight.
Graph add_self_loops(const Graph& g, SelfLoopMode mode, double weight = 1.0);

}  // namespace gelato
