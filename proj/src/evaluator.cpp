#include "gelato/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gelato/errors.hpp"
#include "gelato/parallel.hpp"
#include "gelato/rng.hpp"

namespace gelato {

namespace {

void check_finite(std::span<const double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("scorer returned a non-finite value");
  }
}

// Pairs that are not in the phase's negative pool: the positives of this
// phase and every earlier phase.
Graph excluded_pairs(const EdgeSplit& split, Phase phase) {
  std::vector<Edge> edges;
  const auto add = [&](const std::vector<NodePair>& pairs) {
    for (const NodePair& p : pairs) edges.push_back({p.u, p.v, 1.0});
  };
  add(split.train_pos);
  if (phase != Phase::kTrain) add(split.valid_pos);
  if (phase == Phase::kTest) add(split.test_pos);
  return Graph::from_edges(split.num_nodes, edges, true);
}

}  // namespace

RankSummary rank_summary(const PairScorer& scorer, const EdgeSplit& split, Phase phase,
                         unsigned workers) {
  const NodeId n = split.num_nodes;
  if (scorer.num_nodes() != n) throw DataError("scorer and split disagree on node count");
  const std::vector<NodePair>& positives = split.positives(phase);
  const std::vector<double> pos_scores = scorer.score_pairs(positives, workers);
  check_finite(pos_scores);

  std::vector<double> levels(pos_scores);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t nlev = levels.size();

  const Graph excluded = excluded_pairs(split, phase);
  workers = std::max(1u, workers);

  struct Counts {
    std::vector<std::uint64_t> first_at_or_above;  // negatives whose lower_bound is at j
    std::vector<std::uint64_t> tied;
    std::uint64_t negatives = 0;
    bool bad = false;
  };
  std::vector<Counts> partial(workers);

  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    Counts& c = partial[w];
    c.first_at_or_above.assign(nlev + 1, 0);
    c.tied.assign(nlev, 0);
    std::vector<double> row(n);
    for (std::size_t s = begin; s < end; ++s) {
      const auto u = static_cast<NodeId>(s);
      if (u + 1 >= n) continue;
      scorer.score_row(u, row);
      const auto skip = excluded.neighbors(u);
      auto it = std::upper_bound(skip.begin(), skip.end(), u);
      for (NodeId v = u + 1; v < n; ++v) {
        if (it != skip.end() && *it == v) {
          ++it;
          continue;
        }
        const double x = row[v];
        if (!std::isfinite(x)) {
          c.bad = true;
          return;
        }
        const std::size_t lb =
            static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), x) -
                                     levels.begin());
        ++c.first_at_or_above[lb];
        if (lb < nlev && levels[lb] == x) ++c.tied[lb];
        ++c.negatives;
      }
    }
  });

  std::vector<std::uint64_t> lb_count(nlev + 1, 0), tied(nlev, 0);
  std::uint64_t negatives = 0;
  for (const Counts& c : partial) {
    if (c.bad) throw NumericError("scorer returned a non-finite value");
    for (std::size_t j = 0; j <= nlev; ++j) lb_count[j] += c.first_at_or_above[j];
    for (std::size_t j = 0; j < nlev; ++j) tied[j] += c.tied[j];
    negatives += c.negatives;
  }

  // A negative with lower_bound index q is strictly above every level j < q.
  // above[j] = sum_{q > j} lb_count[q].
  std::vector<std::uint64_t> above(nlev, 0);
  std::uint64_t running = lb_count[nlev];
  for (std::size_t j = nlev; j-- > 0;) {
    above[j] = running;
    running += lb_count[j];
  }

  RankSummary rs;
  rs.total_negatives = negatives;
  rs.positives.reserve(positives.size());
  for (double s : pos_scores) {
    const auto j =
        static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), s) - levels.begin());
    rs.positives.push_back({s, above[j], tied[j]});
  }
  return rs;
}

MetricsReport biased_sample_metrics(const PairScorer& scorer, const EdgeSplit& split, Phase phase,
                                    std::uint64_t neg_per_pos, std::uint64_t seed,
                                    std::span<const double> prec_fractions,
                                    std::span<const std::uint64_t> hits_ks, unsigned workers) {
  if (neg_per_pos == 0) throw ConfigError("biased evaluation needs neg_per_pos >= 1");
  const std::vector<NodePair>& positives = split.positives(phase);
  const NegativePool pool(split, phase);
  const std::vector<NodePair> negatives =
      pool.sample(neg_per_pos * positives.size(), derive_key(seed, {rng_tag::kBiasedEval}));
  const std::vector<double> pos_scores = scorer.score_pairs(positives, workers);
  const std::vector<double> neg_scores = scorer.score_pairs(negatives, workers);
  check_finite(pos_scores);
  check_finite(neg_scores);
  MetricsReport report =
      compute_metrics(summarize_scores(pos_scores, neg_scores), prec_fractions, hits_ks);
  report.biased = true;
  report.phase = phase_name(phase);
  return report;
}

}  // namespace gelato
