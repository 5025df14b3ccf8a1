#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gelato/graph.hpp"

namespace gelato {

// Dense n x r node-attribute matrix, row-major.
class AttributeMatrix {
 public:
  AttributeMatrix() = default;
  // Throws DataError when values.size() != n * r or an entry is not finite.
  AttributeMatrix(std::size_t n, std::size_t r, std::vector<double> values);

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return r_; }
  std::span<const double> row(NodeId u) const { return {values_.data() + u * r_, r_}; }
  std::span<const double> values() const { return values_; }

  // Euclidean norm of each row.
  const std::vector<double>& row_norms() const { return norms_; }

  // Nonzero entries of row u in ascending column order.
  std::span<const std::size_t> nonzero_cols(NodeId u) const {
    return {nz_cols_.data() + nz_offsets_[u], nz_offsets_[u + 1] - nz_offsets_[u]};
  }
  std::span<const double> nonzero_vals(NodeId u) const {
    return {nz_vals_.data() + nz_offsets_[u], nz_offsets_[u + 1] - nz_offsets_[u]};
  }

 private:
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::vector<double> values_;
  std::vector<double> norms_;
  std::vector<std::size_t> nz_offsets_{0};
  std::vector<std::size_t> nz_cols_;
  std::vector<double> nz_vals_;
};

// dot(x_u, x_v) / (|x_u| |x_v|), or 0 when either row is all zero. The dot
// product is accumulated in ascending column order, so the result is
// bit-identical under argument swap and to CosineIndex.
double cosine_similarity(const AttributeMatrix& x, NodePair p);

// Column-major inverted index over the nonzero attributes, for computing
// one-vs-all cosine rows in time proportional to the shared nonzeros.
class CosineIndex {
 public:
  explicit CosineIndex(const AttributeMatrix& x);

  // out[v] = cosine_similarity(x, {u, v}) for every v. out.size() == n.
  void row(NodeId u, std::span<double> out) const;

 private:
  const AttributeMatrix* x_;
  std::vector<std::size_t> col_offsets_;
  std::vector<NodeId> col_rows_;
  std::vector<double> col_vals_;
};

}  // namespace gelato
