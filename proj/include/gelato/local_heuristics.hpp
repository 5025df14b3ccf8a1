#pragma once

#include <span>

#include "gelato/graph.hpp"

namespace gelato {

enum class LocalHeuristic { kCommonNeighbors, kAdamicAdar, kResourceAllocation };

// Neighborhoods come from the unweighted structure with self-loops ignored;
// d_z is the number of distinct non-self neighbors of z.
//   CN = |N(u) & N(v)|,  AA = sum 1 / ln d_z,  RA = sum 1 / d_z
// Common neighbors of a pair u != v have d_z >= 2, so ln d_z > 0.
double local_heuristic(LocalHeuristic kind, const Graph& g, NodePair p);

// out[v] = local_heuristic(kind, g, {u, v}) for every v. Contributions are
// accumulated in ascending z, matching local_heuristic bit for bit.
void local_heuristic_row(LocalHeuristic kind, const Graph& g, NodeId u, std::span<double> out);

}  // namespace gelato
