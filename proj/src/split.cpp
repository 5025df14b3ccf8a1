#include "gelato/split.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gelato/errors.hpp"
#include "gelato/rng.hpp"
#include "gelato/text_format.hpp"

namespace gelato {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::kTrain: return "train";
    case Phase::kValid: return "valid";
    case Phase::kTest: return "test";
  }
  return "?";
}

const std::vector<NodePair>& EdgeSplit::positives(Phase phase) const {
  switch (phase) {
    case Phase::kTrain: return train_pos;
    case Phase::kValid: return valid_pos;
    case Phase::kTest: return test_pos;
  }
  return test_pos;
}

namespace {

void check_ratios(const SplitRatios& r) {
  if (!(r.train > 0.0) || !(r.valid > 0.0) || !(r.test > 0.0)) {
    throw ConfigError("split ratios must be positive");
  }
  if (std::abs(r.train + r.valid + r.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

std::size_t floor_count(double ratio, std::size_t m) {
  // The epsilon keeps exact products such as 0.05 * 100 from flooring to 4.
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m) + 1e-9));
}

std::uint64_t all_pairs(NodeId n) {
  const std::uint64_t nn = n;
  return nn * (nn - (nn > 0 ? 1 : 0)) / 2;
}

}  // namespace

EdgeSplit split_edges(const Graph& g, SplitRatios ratios, std::uint64_t seed) {
  check_ratios(ratios);
  if (!g.undirected()) throw DataError("edge splits require an undirected graph");
  std::vector<NodePair> edges = g.canonical_pairs();
  const std::size_t m = edges.size();
  if (m < 3) throw DataError("graph has " + std::to_string(m) + " edges; at least 3 required");
  const std::size_t n_valid = floor_count(ratios.valid, m);
  const std::size_t n_test = floor_count(ratios.test, m);
  if (n_test == 0) throw DataError("graph too small for a nonempty test set");
  if (n_valid + n_test >= m) throw DataError("graph too small for a nonempty training set");

  CounterRng rng(derive_key(seed, {rng_tag::kSplit}));
  shuffle(std::span<NodePair>(edges), rng);

  EdgeSplit split;
  split.seed = seed;
  split.ratios = ratios;
  split.num_nodes = g.num_nodes();
  split.valid_pos.assign(edges.begin(), edges.begin() + n_valid);
  split.test_pos.assign(edges.begin() + n_valid, edges.begin() + n_valid + n_test);
  split.train_pos.assign(edges.begin() + n_valid + n_test, edges.end());
  std::sort(split.train_pos.begin(), split.train_pos.end());
  std::sort(split.valid_pos.begin(), split.valid_pos.end());
  std::sort(split.test_pos.begin(), split.test_pos.end());
  return split;
}

std::uint64_t negative_pool_size(const EdgeSplit& split, Phase phase) {
  const std::uint64_t base = all_pairs(split.num_nodes) - split.num_edges();
  switch (phase) {
    case Phase::kTest: return base;
    case Phase::kValid: return base + split.test_pos.size();
    case Phase::kTrain: return base + split.test_pos.size() + split.valid_pos.size();
  }
  return base;
}

NegativePool::NegativePool(const EdgeSplit& split, Phase phase)
    : n_(split.num_nodes), size_(negative_pool_size(split, phase)) {
  excluded_.reserve(split.num_edges());
  excluded_.insert(split.train_pos);
  if (phase != Phase::kTrain) excluded_.insert(split.valid_pos);
  if (phase == Phase::kTest) excluded_.insert(split.test_pos);
}

bool NegativePool::contains(NodePair p) const {
  return p.u != p.v && p.u < n_ && p.v < n_ && !excluded_.contains(p.canonical());
}

std::vector<NodePair> NegativePool::sample(std::uint64_t count, std::uint64_t key) const {
  if (count > size_) {
    throw ConfigError("requested " + std::to_string(count) + " negatives from a pool of " +
                      std::to_string(size_));
  }
  std::vector<NodePair> out;
  if (count == 0) return out;
  out.reserve(count);
  CounterRng rng(key);

  constexpr std::uint64_t kEnumerateLimit = 50'000'000;
  if (2 * count > size_ && size_ <= kEnumerateLimit) {
    std::vector<NodePair> pool;
    pool.reserve(size_);
    for (NodeId u = 0; u < n_; ++u) {
      for (NodeId v = u + 1; v < n_; ++v) {
        if (!excluded_.contains({u, v})) pool.push_back({u, v});
      }
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
  }

  PairSet drawn;
  drawn.reserve(count);
  while (out.size() < count) {
    const auto a = static_cast<NodeId>(rng.uniform_index(n_));
    const auto b = static_cast<NodeId>(rng.uniform_index(n_));
    if (a == b) continue;
    const NodePair p = NodePair{a, b}.canonical();
    if (excluded_.contains(p)) continue;
    if (!drawn.insert(p)) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<NodePair> sample_negatives(const EdgeSplit& split, Phase phase, std::uint64_t count,
                                       std::uint64_t seed) {
  return NegativePool(split, phase).sample(count, derive_key(seed, {rng_tag::kNegatives}));
}

std::vector<MaskedBatch> positive_masking_batches(const EdgeSplit& split, std::size_t batch_count,
                                                  std::uint64_t seed) {
  const std::size_t m = split.train_pos.size();
  if (batch_count == 0 || batch_count > m) {
    throw ConfigError("batch_count must be in [1, " + std::to_string(m) + "]");
  }
  if (batch_count == 1 && m >= 2) {
    throw ConfigError("batch_count 1 leaves an empty residual graph");
  }
  std::vector<NodePair> order = split.train_pos;
  CounterRng rng(derive_key(seed, {rng_tag::kBatches}));
  shuffle(std::span<NodePair>(order), rng);

  std::vector<MaskedBatch> batches(batch_count);
  const std::size_t base = m / batch_count;
  const std::size_t extra = m % batch_count;
  std::size_t start = 0;
  for (std::size_t b = 0; b < batch_count; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    MaskedBatch& batch = batches[b];
    batch.batch_pos.assign(order.begin() + start, order.begin() + start + len);
    std::vector<NodePair> sorted_batch = batch.batch_pos;
    std::sort(sorted_batch.begin(), sorted_batch.end());
    std::set_difference(split.train_pos.begin(), split.train_pos.end(), sorted_batch.begin(),
                        sorted_batch.end(), std::back_inserter(batch.residual_edges));
    start += len;
  }
  return batches;
}

void write_split(std::ostream& out, const EdgeSplit& split) {
  out << "# gelato edge split\n";
  out << "seed " << split.seed << '\n';
  out << "ratios " << text::format_double(split.ratios.train) << ' '
      << text::format_double(split.ratios.valid) << ' '
      << text::format_double(split.ratios.test) << '\n';
  out << "nodes " << split.num_nodes << '\n';
  const auto section = [&](const char* name, const std::vector<NodePair>& pairs) {
    out << name << ' ' << pairs.size() << '\n';
    for (const NodePair& p : pairs) out << p.u << ' ' << p.v << '\n';
  };
  section("TRAIN", split.train_pos);
  section("VALID", split.valid_pos);
  section("TEST", split.test_pos);
}

EdgeSplit read_split(std::istream& in) {
  EdgeSplit split;
  std::string line;
  std::vector<NodePair>* section = nullptr;
  std::size_t remaining = 0;
  bool have_seed = false, have_ratios = false, have_nodes = false;
  int sections_seen = 0;
  std::size_t lineno = 0;
  const auto fail = [&](const std::string& why) {
    throw DataError("split line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    if (remaining > 0) {
      std::uint64_t u = 0, v = 0;
      std::string second;
      if (!(fields >> second) || !text::parse_u64(head, u) || !text::parse_u64(second, v)) {
        fail("expected 'u v'");
      }
      if (u >= v || v >= split.num_nodes) fail("pair must be canonical and in range");
      section->push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
      --remaining;
      continue;
    }
    if (head == "seed") {
      if (!(fields >> split.seed)) fail("bad seed");
      have_seed = true;
    } else if (head == "ratios") {
      std::string a, b, c;
      if (!(fields >> a >> b >> c) || !text::parse_double(a, split.ratios.train) ||
          !text::parse_double(b, split.ratios.valid) || !text::parse_double(c, split.ratios.test)) {
        fail("bad ratios");
      }
      have_ratios = true;
    } else if (head == "nodes") {
      std::uint64_t n = 0;
      if (!(fields >> n) || n > 0xFFFFFFFFull) fail("bad node count");
      split.num_nodes = static_cast<NodeId>(n);
      have_nodes = true;
    } else if (head == "TRAIN" || head == "VALID" || head == "TEST") {
      static const char* kOrder[] = {"TRAIN", "VALID", "TEST"};
      if (sections_seen >= 3 || head != kOrder[sections_seen]) fail("sections out of order");
      if (!have_nodes) fail("nodes must precede sections");
      section = sections_seen == 0 ? &split.train_pos
                : sections_seen == 1 ? &split.valid_pos
                                     : &split.test_pos;
      ++sections_seen;
      if (!(fields >> remaining)) fail("bad section count");
      section->reserve(remaining);
    } else {
      fail("unexpected '" + head + "'");
    }
  }
  if (remaining > 0 || sections_seen != 3 || !have_seed || !have_ratios) {
    throw DataError("split file is incomplete");
  }
  for (auto* pairs : {&split.train_pos, &split.valid_pos, &split.test_pos}) {
    std::sort(pairs->begin(), pairs->end());
  }
  return split;
}

void validate_split(const Graph& g, const EdgeSplit& split) {
  if (split.num_nodes != g.num_nodes()) throw DataError("split node count does not match graph");
  std::vector<NodePair> all;
  all.reserve(split.num_edges());
  all.insert(all.end(), split.train_pos.begin(), split.train_pos.end());
  all.insert(all.end(), split.valid_pos.begin(), split.valid_pos.end());
  all.insert(all.end(), split.test_pos.begin(), split.test_pos.end());
  std::sort(all.begin(), all.end());
  if (all != g.canonical_pairs()) throw DataError("split is not a partition of the graph's edges");
}

}  // namespace gelato
