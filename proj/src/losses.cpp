#include "gelato/losses.hpp"

#include <algorithm>
#include <cmath>

#include "gelato/errors.hpp"

namespace gelato {

double npair_loss_flat(std::span<const double> pos, std::span<const double> neg,
                       std::span<const std::size_t> offsets, std::span<double> grad_pos,
                       std::span<double> grad_neg) {
  const bool want_grad = !grad_pos.empty();
  double total = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const std::size_t b = offsets.empty() ? 0 : offsets[i];
    const std::size_t e = offsets.empty() ? 0 : offsets[i + 1];
    if (b == e) {
      if (want_grad) grad_pos[i] = 0.0;
      continue;
    }
    double mx = pos[i];
    for (std::size_t j = b; j < e; ++j) mx = std::max(mx, neg[j]);
    double sum = std::exp(pos[i] - mx);
    for (std::size_t j = b; j < e; ++j) sum += std::exp(neg[j] - mx);
    const double lse = mx + std::log(sum);
    total += lse - pos[i];
    if (want_grad) {
      grad_pos[i] = std::exp(pos[i] - lse) - 1.0;
      for (std::size_t j = b; j < e; ++j) grad_neg[j] = std::exp(neg[j] - lse);
    }
  }
  return total;
}

double npair_loss(std::span<const double> pos_scores,
                  const std::vector<std::vector<double>>& neg_scores_per_pos) {
  if (neg_scores_per_pos.size() != pos_scores.size()) {
    throw ConfigError("npair_loss: one negative list per positive required");
  }
  std::vector<double> flat;
  std::vector<std::size_t> offsets{0};
  for (const auto& negs : neg_scores_per_pos) {
    flat.insert(flat.end(), negs.begin(), negs.end());
    offsets.push_back(flat.size());
  }
  return npair_loss_flat(pos_scores, flat, offsets, {}, {});
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double bce_loss_grad(std::span<const double> scores, std::span<const double> labels,
                     const BceHead& head, std::span<double> grad_scores,
                     std::span<double> head_grad) {
  if (scores.size() != labels.size()) throw ConfigError("bce_loss: scores/labels size mismatch");
  if (scores.empty()) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double y = labels[i];
    if (y != 0.0 && y != 1.0) throw ConfigError("bce_loss: labels must be 0 or 1");
    const double z = head.a * scores[i] + head.b;
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    if (!grad_scores.empty()) {
      const double dz = (sigmoid(z) - y) * inv_n;
      grad_scores[i] = dz * head.a;
      if (!head_grad.empty()) {
        head_grad[0] += dz * scores[i];
        head_grad[1] += dz;
      }
    }
  }
  return total * inv_n;
}

double bce_loss(std::span<const double> scores, std::span<const double> labels,
                const BceHead& head) {
  return bce_loss_grad(scores, labels, head, {}, {});
}

std::vector<double> standardize_scores(std::span<const double> scores) {
  std::vector<double> z(scores.size());
  if (scores.empty()) return z;
  const double n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  const double sd = std::max(std::sqrt(var / n), kStdFloor);
  for (std::size_t i = 0; i < scores.size(); ++i) z[i] = (scores[i] - mean) / sd;
  return z;
}

std::vector<double> standardize_backward(std::span<const double> scores,
                                         std::span<const double> z,
                                         std::span<const double> grad_z) {
  const std::size_t n = scores.size();
  std::vector<double> g(n, 0.0);
  if (n == 0) return g;
  const double nd = static_cast<double>(n);
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= nd;
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  const double raw_sd = std::sqrt(var / nd);
  const bool floored = !(raw_sd > kStdFloor);
  const double sd = floored ? kStdFloor : raw_sd;
  double mean_g = 0.0, mean_gz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_g += grad_z[i];
    mean_gz += grad_z[i] * z[i];
  }
  mean_g /= nd;
  mean_gz /= nd;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = floored ? (grad_z[i] - mean_g) / sd : (grad_z[i] - mean_g - z[i] * mean_gz) / sd;
  }
  return g;
}

}  // namespace gelato
