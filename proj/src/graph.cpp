#include "gelato/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gelato/errors.hpp"

namespace gelato {

namespace {

struct Arc {
  NodeId src;
  NodeId dst;
  double w;
};

std::string pair_str(NodeId u, NodeId v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

}  // namespace

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges, bool undirected) {
  std::vector<Arc> arcs;
  arcs.reserve(undirected ? 2 * edges.size() : edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw DataError("edge " + pair_str(e.u, e.v) + " has node id out of range [0, " +
                      std::to_string(n) + ")");
    }
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw DataError("edge " + pair_str(e.u, e.v) + " has invalid weight " + std::to_string(e.w));
    }
    arcs.push_back({e.u, e.v, e.w});
    if (undirected && e.u != e.v) arcs.push_back({e.v, e.u, e.w});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    if (arcs[i].src == arcs[i - 1].src && arcs[i].dst == arcs[i - 1].dst) {
      throw DataError("duplicate edge " + pair_str(arcs[i].src, arcs[i].dst));
    }
  }

  Graph g;
  g.n_ = n;
  g.undirected_ = undirected;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.columns_.resize(arcs.size());
  g.weights_.resize(arcs.size());
  g.degrees_.assign(n, 0.0);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& a = arcs[i];
    ++g.offsets_[a.src + 1];
    g.columns_[i] = a.dst;
    g.weights_[i] = a.w;
    g.degrees_[a.src] += a.w;
    if (a.src == a.dst) {
      ++g.num_self_loops_;
    } else if (!undirected || a.src < a.dst) {
      ++g.num_edges_;
    }
  }
  for (NodeId u = 0; u < n; ++u) g.offsets_[u + 1] += g.offsets_[u];
  for (double d : g.degrees_) g.volume_ += d;
  return g;
}

double Graph::weight(NodeId u, NodeId v) const {
  const auto cols = neighbors(u);
  const auto it = std::lower_bound(cols.begin(), cols.end(), v);
  if (it == cols.end() || *it != v) return 0.0;
  return weights_[offsets_[u] + static_cast<std::size_t>(it - cols.begin())];
}

bool Graph::has_arc(NodeId u, NodeId v) const {
  const auto cols = neighbors(u);
  return std::binary_search(cols.begin(), cols.end(), v);
}

std::vector<NodePair> Graph::canonical_pairs() const {
  std::vector<NodePair> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (v == u) continue;
      if (undirected_ && v < u) continue;
      out.push_back({u, v});
    }
  }
  return out;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < n_; ++u) {
    const auto cols = neighbors(u);
    const auto ws = neighbor_weights(u);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const NodeId v = cols[i];
      if (v == u) continue;
      if (undirected_ && v < u) continue;
      out.push_back({u, v, ws[i]});
    }
  }
  return out;
}

Graph add_self_loops(const Graph& g, SelfLoopMode mode, double weight) {
  std::vector<Edge> edges;
  edges.reserve(g.num_arcs() + g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const bool wants_loop = mode == SelfLoopMode::kAll || g.degree(u) == 0.0;
    const auto cols = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    bool had_loop = false;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const NodeId v = cols[i];
      if (g.undirected() && v < u) continue;
      double w = ws[i];
      if (v == u) {
        had_loop = true;
        if (wants_loop) w += weight;
      }
      edges.push_back({u, v, w});
    }
    if (wants_loop && !had_loop) edges.push_back({u, u, weight});
  }
  return Graph::from_edges(g.num_nodes(), edges, g.undirected());
}

}  // namespace gelato
