#pragma once

#include <span>
#include <vector>

namespace gelato {

// N-pair loss: -sum_i log(exp(s_i) / (exp(s_i) + sum_j exp(n_ij))), each term
// evaluated as logsumexp(s_i, n_i.) - s_i with the max shift. A positive with
// no negatives contributes 0.
double npair_loss(std::span<const double> pos_scores,
                  const std::vector<std::vector<double>>& neg_scores_per_pos);

// Flat form: negatives of positive i are neg[offsets[i] .. offsets[i+1]).
// Writes dL/dpos and dL/dneg when the gradient spans are non-empty.
double npair_loss_flat(std::span<const double> pos, std::span<const double> neg,
                       std::span<const std::size_t> offsets, std::span<double> grad_pos,
                       std::span<double> grad_neg);

// Affine-sigmoid head p = sigmoid(a * s + b) feeding the mean binary
// cross-entropy, computed from logits in the stable form
// max(z, 0) - z * y + log1p(exp(-|z|)).
struct BceHead {
  double a = 1.0;
  double b = 0.0;
};

double bce_loss(std::span<const double> scores, std::span<const double> labels,
                const BceHead& head = {});

// Also writes dL/dscore and accumulates dL/da, dL/db into head_grad[0..1].
double bce_loss_grad(std::span<const double> scores, std::span<const double> labels,
                     const BceHead& head, std::span<double> grad_scores,
                     std::span<double> head_grad);

// z = (s - mean) / max(population std, 1e-12).
std::vector<double> standardize_scores(std::span<const double> scores);

// Reverse of standardize_scores: given z and dL/dz, returns dL/ds.
std::vector<double> standardize_backward(std::span<const double> scores,
                                         std::span<const double> z,
                                         std::span<const double> grad_z);

inline constexpr double kStdFloor = 1e-12;

}  // namespace gelato
