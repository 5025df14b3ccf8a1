#include "gelato/autocovariance.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gelato/errors.hpp"
#include "gelato/parallel.hpp"

namespace gelato {

namespace {

// Pair indices grouped by source, sources ascending.
struct SourceGroups {
  std::vector<NodeId> sources;
  std::vector<std::size_t> offsets;  // into order
  std::vector<std::size_t> order;    // pair indices
};

SourceGroups group_by_source(std::span<const NodePair> pairs) {
  SourceGroups g;
  g.order.resize(pairs.size());
  std::iota(g.order.begin(), g.order.end(), std::size_t{0});
  std::stable_sort(g.order.begin(), g.order.end(),
                   [&](std::size_t a, std::size_t b) { return pairs[a].u < pairs[b].u; });
  for (std::size_t i = 0; i < g.order.size(); ++i) {
    const NodeId u = pairs[g.order[i]].u;
    if (g.sources.empty() || g.sources.back() != u) {
      g.sources.push_back(u);
      g.offsets.push_back(i);
    }
  }
  g.offsets.push_back(g.order.size());
  return g;
}

}  // namespace

Autocovariance::Autocovariance(CsrView graph, AcParams params) : csr_(graph), params_(params) {
  degrees_.assign(csr_.n, 0.0);
  for (NodeId i = 0; i < csr_.n; ++i) {
    double d = 0.0;
    for (std::size_t a = csr_.offsets[i]; a < csr_.offsets[i + 1]; ++a) d += csr_.weights[a];
    if (!(d > 0.0)) {
      throw DataError("node " + std::to_string(i) +
                      " has zero degree; the transition distribution is undefined");
    }
    degrees_[i] = d;
    volume_ += d;
  }
}

void Autocovariance::step(std::span<const double> x, std::span<double> next) const {
  std::fill(next.begin(), next.end(), 0.0);
  for (NodeId i = 0; i < csr_.n; ++i) {
    if (x[i] == 0.0) continue;
    const double scaled = x[i] / degrees_[i];
    for (std::size_t a = csr_.offsets[i]; a < csr_.offsets[i + 1]; ++a) {
      next[csr_.columns[a]] += scaled * csr_.weights[a];
    }
  }
}

void Autocovariance::row(NodeId u, std::span<double> out) const {
  const NodeId n = csr_.n;
  std::vector<double> x(n, 0.0), next(n);
  x[u] = 1.0;
  for (unsigned k = 0; k < params_.t; ++k) {
    step(x, next);
    x.swap(next);
  }
  const double du = degrees_[u];
  const double vol2 = volume_ * volume_;
  for (NodeId v = 0; v < n; ++v) out[v] = du * x[v] / volume_ - du * degrees_[v] / vol2;
}

ScoreBlock Autocovariance::rows(std::span<const NodeId> sources, unsigned workers) const {
  ScoreBlock block;
  block.sources.assign(sources.begin(), sources.end());
  block.n = csr_.n;
  block.scores.resize(sources.size() * static_cast<std::size_t>(csr_.n));
  parallel_chunks(sources.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      row(sources[i], {block.scores.data() + i * csr_.n, csr_.n});
    }
  });
  return block;
}

std::vector<double> Autocovariance::pairs(std::span<const NodePair> pairs, unsigned workers) const {
  std::vector<double> out(pairs.size());
  const SourceGroups groups = group_by_source(pairs);
  last_sources_ = groups.sources.size();
  parallel_chunks(groups.sources.size(), workers,
                  [&](std::size_t begin, std::size_t end, unsigned) {
                    std::vector<double> buf(csr_.n);
                    for (std::size_t s = begin; s < end; ++s) {
                      row(groups.sources[s], buf);
                      for (std::size_t k = groups.offsets[s]; k < groups.offsets[s + 1]; ++k) {
                        const std::size_t idx = groups.order[k];
                        out[idx] = buf[pairs[idx].v];
                      }
                    }
                  });
  return out;
}

std::vector<double> Autocovariance::pairs_vjp(std::span<const NodePair> pairs,
                                              std::span<const double> pair_grads,
                                              unsigned workers) const {
  const NodeId n = csr_.n;
  const std::size_t nnz = csr_.columns.size();
  const unsigned t = params_.t;
  const double vol = volume_;
  const double vol2 = vol * vol;
  const double vol3 = vol2 * vol;
  const SourceGroups groups = group_by_source(pairs);
  last_sources_ = groups.sources.size();
  workers = std::max(1u, std::min<unsigned>(workers, std::max<std::size_t>(1, groups.sources.size())));

  struct Partial {
    std::vector<double> arc_grad;
    std::vector<double> deg_grad;
    double vol_grad = 0.0;
  };
  std::vector<Partial> partial(workers);

  parallel_chunks(groups.sources.size(), workers, [&](std::size_t begin, std::size_t end,
                                                      unsigned w) {
    Partial& acc = partial[w];
    acc.arc_grad.assign(nnz, 0.0);
    acc.deg_grad.assign(n, 0.0);
    // walks[k] = e_u P^k
    std::vector<std::vector<double>> walks(t + 1, std::vector<double>(n));
    std::vector<double> adj(n), adj_prev(n);
    for (std::size_t s = begin; s < end; ++s) {
      const NodeId u = groups.sources[s];
      std::fill(walks[0].begin(), walks[0].end(), 0.0);
      walks[0][u] = 1.0;
      for (unsigned k = 0; k < t; ++k) step(walks[k], walks[k + 1]);

      const double du = degrees_[u];
      const std::vector<double>& xt = walks[t];
      std::fill(adj.begin(), adj.end(), 0.0);
      for (std::size_t k = groups.offsets[s]; k < groups.offsets[s + 1]; ++k) {
        const std::size_t idx = groups.order[k];
        const double g = pair_grads[idx];
        if (g == 0.0) continue;
        const NodeId v = pairs[idx].v;
        const double dv = degrees_[v];
        adj[v] += g * du / vol;
        acc.deg_grad[u] += g * (xt[v] / vol - dv / vol2);
        acc.deg_grad[v] -= g * du / vol2;
        acc.vol_grad += g * (-du * xt[v] / vol2 + 2.0 * du * dv / vol3);
      }

      // Reverse through x_{k+1}[j] = sum_i x_k[i] A_ij / d_i.
      for (unsigned k = t; k-- > 0;) {
        const std::vector<double>& x = walks[k];
        std::fill(adj_prev.begin(), adj_prev.end(), 0.0);
        for (NodeId i = 0; i < n; ++i) {
          double sum = 0.0;
          const std::size_t a0 = csr_.offsets[i], a1 = csr_.offsets[i + 1];
          for (std::size_t a = a0; a < a1; ++a) sum += csr_.weights[a] * adj[csr_.columns[a]];
          const double di = degrees_[i];
          adj_prev[i] = sum / di;
          if (x[i] != 0.0) {
            acc.deg_grad[i] -= x[i] * sum / (di * di);
            const double scaled = x[i] / di;
            for (std::size_t a = a0; a < a1; ++a) acc.arc_grad[a] += scaled * adj[csr_.columns[a]];
          }
        }
        adj.swap(adj_prev);
      }
    }
  });

  std::vector<double> arc_grad(nnz, 0.0);
  std::vector<double> deg_grad(n, 0.0);
  double vol_grad = 0.0;
  for (const Partial& p : partial) {
    if (p.arc_grad.empty()) continue;
    for (std::size_t a = 0; a < nnz; ++a) arc_grad[a] += p.arc_grad[a];
    for (NodeId i = 0; i < n; ++i) deg_grad[i] += p.deg_grad[i];
    vol_grad += p.vol_grad;
  }
  // d_i = sum_j A_ij and vol = sum_i d_i.
  for (NodeId i = 0; i < n; ++i) {
    const double g = deg_grad[i] + vol_grad;
    for (std::size_t a = csr_.offsets[i]; a < csr_.offsets[i + 1]; ++a) arc_grad[a] += g;
  }
  return arc_grad;
}

}  // namespace gelato
