#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "gelato/attributes.hpp"
#include "gelato/graph.hpp"

namespace gelato {

// One-hidden-layer edge-weight MLP over the permutation-invariant pair
// features [x_u + x_v ; |x_u - x_v|]. All parameters live in one contiguous
// buffer laid out as W1 (hidden x 2r, row-major), b1 (hidden), W2 (hidden),
// b2 (1).
class MlpParams {
 public:
  MlpParams() = default;
  MlpParams(std::size_t attr_dim, std::size_t hidden);  // all zeros

  // Each tensor uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], fan_in = 2r for
  // the first layer and hidden for the second, drawn from stream (seed, init).
  static MlpParams init_uniform(std::size_t attr_dim, std::size_t hidden, std::uint64_t seed);

  static std::size_t count_for(std::size_t attr_dim, std::size_t hidden) {
    return 2 * attr_dim * hidden + 2 * hidden + 1;
  }

  std::size_t attr_dim() const { return r_; }
  std::size_t input_dim() const { return 2 * r_; }
  std::size_t hidden() const { return h_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<const double> w1() const { return {values_.data(), h_ * 2 * r_}; }
  std::span<const double> b1() const { return {values_.data() + h_ * 2 * r_, h_}; }
  std::span<const double> w2() const { return {values_.data() + h_ * 2 * r_ + h_, h_}; }
  double b2() const { return values_.back(); }

  std::span<double> w1() { return {values_.data(), h_ * 2 * r_}; }
  std::span<double> b1() { return {values_.data() + h_ * 2 * r_, h_}; }
  std::span<double> w2() { return {values_.data() + h_ * 2 * r_ + h_, h_}; }
  double& b2() { return values_.back(); }

 private:
  std::size_t r_ = 0;
  std::size_t h_ = 0;
  std::vector<double> values_;
};

// Sparse pair features: entries with exactly-zero value are omitted, indices
// ascending, so the feature vector of (u, v) equals that of (v, u).
struct PairFeatures {
  std::vector<std::size_t> index;
  std::vector<double> value;
};
void pair_features(const AttributeMatrix& x, NodePair p, PairFeatures& out);

// Dropout for one forward pass: hidden unit h of pair slot e is kept iff
// uniform01 at counter e * hidden + h of stream `key` is >= rate; kept units
// are scaled by 1 / (1 - rate).
struct DropoutSpec {
  bool active = false;
  double rate = 0.0;
  std::uint64_t key = 0;
};

// Per-pair forward record for reverse mode.
struct MlpActivation {
  std::vector<double> hidden;  // post-ReLU, post-dropout
  std::vector<double> scale;   // dropout factor per unit (0, 1 or 1/(1-rate))
  double output = 0.0;         // sigmoid output
};

// sigmoid(W2 . dropout(relu(W1 f + b1)) + b2). `slot` selects the dropout
// counters. With dropout inactive the result is symmetric in (u, v) bit for
// bit.
double mlp_forward(const MlpParams& params, const PairFeatures& f, const DropoutSpec& dropout,
                   std::size_t slot, MlpActivation* record = nullptr);

double mlp_edge_weight(const MlpParams& params, const AttributeMatrix& x, NodePair p,
                       const DropoutSpec& dropout = {}, std::size_t slot = 0);

// Accumulates d(output)/d(params) * grad_output into grads (same layout).
void mlp_backward(const MlpParams& params, const PairFeatures& f, const MlpActivation& act,
                  double grad_output, std::span<double> grads);

// Checkpoint: "GPAR" | u64 r | u64 hidden | f64 W1, b1, W2, b2 (little-endian).
void write_checkpoint(std::ostream& out, const MlpParams& params);
MlpParams read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const MlpParams& params);
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace gelato
