#include "gelato/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gelato/errors.hpp"
#include "gelato/text_format.hpp"

namespace gelato {

namespace {

// Positive indices by descending score.
std::vector<std::size_t> descending(const RankSummary& rs) {
  std::vector<std::size_t> order(rs.positives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rs.positives[a].score > rs.positives[b].score;
  });
  return order;
}

}  // namespace

RankSummary summarize_scores(std::span<const double> pos_scores,
                             std::span<const double> neg_scores) {
  std::vector<double> neg(neg_scores.begin(), neg_scores.end());
  std::sort(neg.begin(), neg.end());
  RankSummary rs;
  rs.total_negatives = neg.size();
  rs.positives.reserve(pos_scores.size());
  for (double s : pos_scores) {
    const auto [lo, hi] = std::equal_range(neg.begin(), neg.end(), s);
    rs.positives.push_back({s, static_cast<std::uint64_t>(neg.end() - hi),
                            static_cast<std::uint64_t>(hi - lo)});
  }
  return rs;
}

double precision_at_k(const RankSummary& rs, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("prec@k fraction must be in (0, 1]");
  const auto k = static_cast<std::uint64_t>(
      std::llround(fraction * static_cast<double>(rs.positives.size())));
  if (k == 0) throw ConfigError("prec@k: k rounds to 0");
  const auto order = descending(rs);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const RankedPositive& p = rs.positives[order[i]];
    if (i + p.above + p.tied + 1 <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double hits_at_k(const RankSummary& rs, std::uint64_t k) {
  if (k == 0) throw ConfigError("hits@k: k must be >= 1");
  if (rs.positives.empty()) return 0.0;
  std::uint64_t count = 0;
  for (const RankedPositive& p : rs.positives) {
    if (p.above + p.tied < k) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(rs.positives.size());
}

double average_precision(const RankSummary& rs) {
  if (rs.positives.empty()) throw ConfigError("average precision needs at least one positive");
  const auto order = descending(rs);
  double sum = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const RankedPositive& p = rs.positives[order[i]];
    const auto hits = static_cast<double>(i + 1);
    sum += hits / (hits + static_cast<double>(p.above + p.tied));
  }
  return sum / static_cast<double>(order.size());
}

double auc(const RankSummary& rs) {
  if (rs.positives.empty() || rs.total_negatives == 0) {
    throw ConfigError("AUC needs at least one positive and one negative");
  }
  unsigned __int128 twice = 0;
  for (const RankedPositive& p : rs.positives) {
    const std::uint64_t below = rs.total_negatives - p.above - p.tied;
    twice += 2 * static_cast<unsigned __int128>(below) + p.tied;
  }
  const long double denom = 2.0L * static_cast<long double>(rs.positives.size()) *
                            static_cast<long double>(rs.total_negatives);
  return static_cast<double>(static_cast<long double>(twice) / denom);
}

std::vector<std::pair<double, double>> pr_curve(const RankSummary& rs) {
  const auto order = descending(rs);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(order.size());
  const auto total = static_cast<double>(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const RankedPositive& p = rs.positives[order[i]];
    const auto hits = static_cast<double>(i + 1);
    curve.emplace_back(hits / total, hits / (hits + static_cast<double>(p.above + p.tied)));
  }
  return curve;
}

MetricsReport compute_metrics(const RankSummary& rs, std::span<const double> prec_fractions,
                              std::span<const std::uint64_t> hits_ks) {
  MetricsReport r;
  r.num_positives = rs.positives.size();
  r.num_negatives = rs.total_negatives;
  r.ap = average_precision(rs);
  r.auc = rs.total_negatives > 0 ? auc(rs) : 1.0;
  for (double f : prec_fractions) r.prec_at[f] = precision_at_k(rs, f);
  for (std::uint64_t k : hits_ks) r.hits_at[k] = hits_at_k(rs, k);
  r.pr_curve = pr_curve(rs);
  return r;
}

void write_report(std::ostream& out, const MetricsReport& report) {
  out << "# gelato metrics report\n";
  if (report.biased) {
    out << "# BIASED: negatives were downsampled; values overstate real-world performance\n";
  }
  out << "protocol " << (report.biased ? "BIASED" : "unbiased") << '\n';
  out << "phase " << report.phase << '\n';
  out << "tie_policy pessimistic\n";
  out << "auc_ties half_credit\n";
  out << "prec_k_rounding nearest\n";
  out << "positives " << report.num_positives << '\n';
  out << "negatives " << report.num_negatives << '\n';
  out << "ap " << text::format_double(report.ap) << '\n';
  out << "auc " << text::format_double(report.auc) << '\n';
  for (const auto& [f, v] : report.prec_at) {
    out << "prec@" << text::format_double(f * 100.0) << "% " << text::format_double(v) << '\n';
  }
  for (const auto& [k, v] : report.hits_at) {
    out << "hits@" << k << ' ' << text::format_double(v) << '\n';
  }
  out << "pr_curve_points " << report.pr_curve.size() << '\n';
}

void write_pr_csv(std::ostream& out, const MetricsReport& report) {
  out << "recall,precision\n";
  for (const auto& [recall, precision] : report.pr_curve) {
    out << text::format_double(recall) << ',' << text::format_double(precision) << '\n';
  }
}

}  // namespace gelato
