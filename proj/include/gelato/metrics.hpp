#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gelato {

// Sufficient statistic for rank metrics: for each positive, how many
// negatives score strictly higher and how many score equal.
struct RankedPositive {
  double score = 0.0;
  std::uint64_t above = 0;
  std::uint64_t tied = 0;
};

struct RankSummary {
  std::vector<RankedPositive> positives;
  std::uint64_t total_negatives = 0;
};

// Counts from explicit score lists (sorts a copy of the negatives).
RankSummary summarize_scores(std::span<const double> pos_scores,
                             std::span<const double> neg_scores);

// Tie policy: for prec@k, hits@k and AP a positive ranks below every
// negative with an equal score (pessimistic). Sorting positives by
// descending score, positive i (0-based) holds global rank
// i + above_i + tied_i + 1. AUC gives tied pairs half credit.

// k = round(fraction * |positives|); fraction of the top-k candidates that
// are positives. Throws ConfigError when k == 0 or fraction not in (0, 1].
double precision_at_k(const RankSummary& rs, double fraction);

// Fraction of positives with above + tied < k. Throws ConfigError when k == 0.
double hits_at_k(const RankSummary& rs, std::uint64_t k);

// Mean over positives (descending score) of i / (i + above_i + tied_i), with
// i the 1-based positive count: the step-interpolated PR area.
double average_precision(const RankSummary& rs);

// sum(2 * below + tied) / (2 * |pos| * |neg|). Throws ConfigError without
// positives or negatives.
double auc(const RankSummary& rs);

// (recall, precision) at each positive, in descending score order.
std::vector<std::pair<double, double>> pr_curve(const RankSummary& rs);

struct MetricsReport {
  bool biased = false;
  std::string phase = "test";
  std::uint64_t num_positives = 0;
  std::uint64_t num_negatives = 0;
  double ap = 0.0;
  double auc = 0.0;
  std::map<double, double> prec_at;         // fraction -> value
  std::map<std::uint64_t, double> hits_at;  // rank -> value
  std::vector<std::pair<double, double>> pr_curve;
};

MetricsReport compute_metrics(const RankSummary& rs, std::span<const double> prec_fractions,
                              std::span<const std::uint64_t> hits_ks);

// Structured text, one "name value" pair per line.
void write_report(std::ostream& out, const MetricsReport& report);
// "recall,precision" header then one point per line.
void write_pr_csv(std::ostream& out, const MetricsReport& report);

}  // namespace gelato
