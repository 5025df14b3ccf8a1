#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gelato {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}
};

// Bias-corrected Adam step:
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
//   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_update(AdamState& state, std::span<double> params, std::span<const double> grads,
                 double lr);

}  // namespace gelato
