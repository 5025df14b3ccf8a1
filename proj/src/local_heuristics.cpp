#include "gelato/local_heuristics.hpp"

#include <algorithm>
#include <cmath>

namespace gelato {

namespace {

std::size_t structural_degree(const Graph& g, NodeId z) {
  const auto nb = g.neighbors(z);
  return nb.size() - (std::binary_search(nb.begin(), nb.end(), z) ? 1 : 0);
}

double term(LocalHeuristic kind, std::size_t dz) {
  switch (kind) {
    case LocalHeuristic::kCommonNeighbors: return 1.0;
    case LocalHeuristic::kAdamicAdar: return dz > 1 ? 1.0 / std::log(static_cast<double>(dz)) : 0.0;
    case LocalHeuristic::kResourceAllocation: return 1.0 / static_cast<double>(dz);
  }
  return 0.0;
}

}  // namespace

double local_heuristic(LocalHeuristic kind, const Graph& g, NodePair p) {
  const auto a = g.neighbors(p.u);
  const auto b = g.neighbors(p.v);
  double score = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      const NodeId z = a[i];
      if (z != p.u && z != p.v) score += term(kind, structural_degree(g, z));
      ++i;
      ++j;
    }
  }
  return score;
}

void local_heuristic_row(LocalHeuristic kind, const Graph& g, NodeId u, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (NodeId z : g.neighbors(u)) {
    if (z == u) continue;
    const double t = term(kind, structural_degree(g, z));
    for (NodeId v : g.neighbors(z)) {
      if (v != z) out[v] += t;
    }
  }
  out[u] = 0.0;  // self-pairs are never candidates
}

}  // namespace gelato
