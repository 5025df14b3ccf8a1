#include "gelato/mlp.hpp"

#include <cmath>
#include <fstream>

#include "gelato/binary_io.hpp"
#include "gelato/errors.hpp"
#include "gelato/rng.hpp"

namespace gelato {

MlpParams::MlpParams(std::size_t attr_dim, std::size_t hidden)
    : r_(attr_dim), h_(hidden), values_(count_for(attr_dim, hidden), 0.0) {}

MlpParams MlpParams::init_uniform(std::size_t attr_dim, std::size_t hidden, std::uint64_t seed) {
  MlpParams p(attr_dim, hidden);
  CounterRng rng(derive_key(seed, {rng_tag::kInit}));
  const double bound1 = attr_dim > 0 ? 1.0 / std::sqrt(2.0 * static_cast<double>(attr_dim)) : 0.0;
  const double bound2 = hidden > 0 ? 1.0 / std::sqrt(static_cast<double>(hidden)) : 0.0;
  const auto fill = [&](std::span<double> xs, double bound) {
    for (double& x : xs) x = (2.0 * rng.uniform01() - 1.0) * bound;
  };
  fill(p.w1(), bound1);
  fill(p.b1(), bound1);
  fill(p.w2(), bound2);
  p.b2() = (2.0 * rng.uniform01() - 1.0) * bound2;
  return p;
}

void pair_features(const AttributeMatrix& x, NodePair p, PairFeatures& out) {
  out.index.clear();
  out.value.clear();
  const std::size_t r = x.cols();
  const auto cu = x.nonzero_cols(p.u);
  const auto vu = x.nonzero_vals(p.u);
  const auto cv = x.nonzero_cols(p.v);
  const auto vv = x.nonzero_vals(p.v);
  // Union of nonzero columns; a and b are the two rows' values at column k.
  thread_local std::vector<std::size_t> cols;
  thread_local std::vector<double> diff;
  cols.clear();
  diff.clear();
  std::size_t i = 0, j = 0;
  while (i < cu.size() || j < cv.size()) {
    std::size_t k;
    double a = 0.0, b = 0.0;
    if (j == cv.size() || (i < cu.size() && cu[i] < cv[j])) {
      k = cu[i];
      a = vu[i++];
    } else if (i == cu.size() || cv[j] < cu[i]) {
      k = cv[j];
      b = vv[j++];
    } else {
      k = cu[i];
      a = vu[i++];
      b = vv[j++];
    }
    const double sum = a + b;
    if (sum != 0.0) {
      out.index.push_back(k);
      out.value.push_back(sum);
    }
    const double d = std::abs(a - b);
    if (d != 0.0) {
      cols.push_back(r + k);
      diff.push_back(d);
    }
  }
  out.index.insert(out.index.end(), cols.begin(), cols.end());
  out.value.insert(out.value.end(), diff.begin(), diff.end());
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double mlp_forward(const MlpParams& params, const PairFeatures& f, const DropoutSpec& dropout,
                   std::size_t slot, MlpActivation* record) {
  const std::size_t h = params.hidden();
  const std::size_t in = params.input_dim();
  const auto w1 = params.w1();
  const auto b1 = params.b1();
  const auto w2 = params.w2();
  if (record) {
    record->hidden.assign(h, 0.0);
    record->scale.assign(h, 1.0);
  }
  const bool drop = dropout.active && dropout.rate > 0.0;
  const double keep_scale = drop ? 1.0 / (1.0 - dropout.rate) : 1.0;
  CounterRng rng(dropout.key);
  double out = params.b2();
  for (std::size_t k = 0; k < h; ++k) {
    const double* row = w1.data() + k * in;
    double pre = b1[k];
    for (std::size_t e = 0; e < f.index.size(); ++e) pre += row[f.index[e]] * f.value[e];
    double scale = 1.0;
    if (drop) {
      const double u = static_cast<double>(rng.at(slot * h + k) >> 11) * 0x1.0p-53;
      scale = u >= dropout.rate ? keep_scale : 0.0;
    }
    const double act = pre > 0.0 ? pre * scale : 0.0;
    if (record) {
      record->hidden[k] = act;
      record->scale[k] = pre > 0.0 ? scale : 0.0;
    }
    out += w2[k] * act;
  }
  const double w = sigmoid(out);
  if (record) record->output = w;
  return w;
}

double mlp_edge_weight(const MlpParams& params, const AttributeMatrix& x, NodePair p,
                       const DropoutSpec& dropout, std::size_t slot) {
  PairFeatures f;
  pair_features(x, p, f);
  return mlp_forward(params, f, dropout, slot);
}

void mlp_backward(const MlpParams& params, const PairFeatures& f, const MlpActivation& act,
                  double grad_output, std::span<double> grads) {
  const std::size_t h = params.hidden();
  const std::size_t in = params.input_dim();
  const std::size_t off_b1 = h * in;
  const std::size_t off_w2 = off_b1 + h;
  const std::size_t off_b2 = off_w2 + h;
  const double go = grad_output * act.output * (1.0 - act.output);
  if (go == 0.0) return;
  const auto w2 = params.w2();
  grads[off_b2] += go;
  for (std::size_t k = 0; k < h; ++k) {
    grads[off_w2 + k] += go * act.hidden[k];
    if (act.scale[k] == 0.0) continue;
    const double gpre = go * w2[k] * act.scale[k];
    grads[off_b1 + k] += gpre;
    double* row = grads.data() + k * in;
    for (std::size_t e = 0; e < f.index.size(); ++e) row[f.index[e]] += gpre * f.value[e];
  }
}

void write_checkpoint(std::ostream& out, const MlpParams& params) {
  out.write("GPAR", 4);
  binio::write_le<std::uint64_t>(out, params.attr_dim());
  binio::write_le<std::uint64_t>(out, params.hidden());
  for (double v : params.values()) binio::write_le<double>(out, v);
}

MlpParams read_checkpoint(std::istream& in) {
  binio::expect_magic(in, "GPAR");
  const auto r = binio::read_le<std::uint64_t>(in, "checkpoint attribute dim");
  const auto h = binio::read_le<std::uint64_t>(in, "checkpoint hidden width");
  if (r > (1u << 24) || h > (1u << 20)) throw DataError("checkpoint dimensions out of range");
  MlpParams p(r, h);
  for (double& v : p.values()) {
    v = binio::read_le<double>(in, "checkpoint parameter");
    if (!std::isfinite(v)) throw DataError("checkpoint contains a non-finite parameter");
  }
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(out, params);
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace gelato
