#include "gelato/attributes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gelato/errors.hpp"

namespace gelato {

AttributeMatrix::AttributeMatrix(std::size_t n, std::size_t r, std::vector<double> values)
    : n_(n), r_(r), values_(std::move(values)) {
  if (values_.size() != n_ * r_) {
    throw DataError("attribute matrix expects " + std::to_string(n_ * r_) + " values, got " +
                    std::to_string(values_.size()));
  }
  norms_.assign(n_, 0.0);
  nz_offsets_.assign(n_ + 1, 0);
  for (std::size_t u = 0; u < n_; ++u) {
    double sq = 0.0;
    for (std::size_t k = 0; k < r_; ++k) {
      const double x = values_[u * r_ + k];
      if (!std::isfinite(x)) {
        throw DataError("attribute (" + std::to_string(u) + ", " + std::to_string(k) +
                        ") is not finite");
      }
      if (x != 0.0) {
        nz_cols_.push_back(k);
        nz_vals_.push_back(x);
        sq += x * x;
      }
    }
    norms_[u] = std::sqrt(sq);
    nz_offsets_[u + 1] = nz_cols_.size();
  }
}

double cosine_similarity(const AttributeMatrix& x, NodePair p) {
  const double nu = x.row_norms()[p.u];
  const double nv = x.row_norms()[p.v];
  if (nu == 0.0 || nv == 0.0) return 0.0;
  // Sparse merge in ascending column order. Skipped terms are exact zeros, so
  // the sum matches the dense sequential loop.
  const auto cu = x.nonzero_cols(p.u);
  const auto xu = x.nonzero_vals(p.u);
  const auto cv = x.nonzero_cols(p.v);
  const auto xv = x.nonzero_vals(p.v);
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < cu.size() && j < cv.size()) {
    if (cu[i] < cv[j]) {
      ++i;
    } else if (cv[j] < cu[i]) {
      ++j;
    } else {
      dot += xu[i] * xv[j];
      ++i;
      ++j;
    }
  }
  // Rounding can push self-similar rows just past 1.
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

CosineIndex::CosineIndex(const AttributeMatrix& x) : x_(&x) {
  const std::size_t r = x.cols();
  col_offsets_.assign(r + 1, 0);
  for (NodeId u = 0; u < x.rows(); ++u) {
    for (std::size_t k : x.nonzero_cols(u)) ++col_offsets_[k + 1];
  }
  for (std::size_t k = 0; k < r; ++k) col_offsets_[k + 1] += col_offsets_[k];
  col_rows_.resize(col_offsets_[r]);
  col_vals_.resize(col_offsets_[r]);
  std::vector<std::size_t> fill(col_offsets_.begin(), col_offsets_.end() - 1);
  for (NodeId u = 0; u < x.rows(); ++u) {
    const auto cols = x.nonzero_cols(u);
    const auto vals = x.nonzero_vals(u);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::size_t slot = fill[cols[i]]++;
      col_rows_[slot] = u;
      col_vals_[slot] = vals[i];
    }
  }
}

void CosineIndex::row(NodeId u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto& norms = x_->row_norms();
  const double nu = norms[u];
  if (nu == 0.0) return;
  const auto cols = x_->nonzero_cols(u);
  const auto vals = x_->nonzero_vals(u);
  // Columns visited in ascending order, so each out[v] accumulates in the
  // same order as cosine_similarity.
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const double xu = vals[i];
    const std::size_t k = cols[i];
    for (std::size_t s = col_offsets_[k]; s < col_offsets_[k + 1]; ++s) {
      out[col_rows_[s]] += xu * col_vals_[s];
    }
  }
  for (NodeId v = 0; v < out.size(); ++v) {
    const double nv = norms[v];
    out[v] = nv == 0.0 ? 0.0 : std::clamp(out[v] / (nu * nv), -1.0, 1.0);
  }
}

}  // namespace gelato
