#pragma once

#include <cstdint>
#include <span>

#include "gelato/metrics.hpp"
#include "gelato/scorer.hpp"
#include "gelato/split.hpp"

namespace gelato {

// Ranks the phase positives against the entire phase negative pool. Sources
// are streamed one row at a time per worker; the pool is never
// materialized. Each negative score is binary-searched into the sorted
// distinct positive scores and only integer counts are kept, so the result
// does not depend on the worker count. Throws NumericError on a non-finite
// score.
RankSummary rank_summary(const PairScorer& scorer, const EdgeSplit& split, Phase phase,
                         unsigned workers = 1);

// Biased comparison protocol: neg_per_pos negatives per positive sampled
// uniformly from the phase pool with stream (seed, biased-eval). The report
// is flagged biased. Throws ConfigError when the pool is too small.
MetricsReport biased_sample_metrics(const PairScorer& scorer, const EdgeSplit& split, Phase phase,
                                    std::uint64_t neg_per_pos, std::uint64_t seed,
                                    std::span<const double> prec_fractions,
                                    std::span<const std::uint64_t> hits_ks, unsigned workers = 1);

}  // namespace gelato
