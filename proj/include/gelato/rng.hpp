#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace gelato {

// Counter-based 64-bit generator. Output i of stream `key` is
//
//   splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15)
//
// where splitmix64_mix is the SplitMix64 finalizer
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
// and key = derive_key(seed, tags...). Every random decision in the toolkit
// draws from a stream keyed by its purpose, so results are reproducible
// across implementations and independent of thread schedule.
std::uint64_t splitmix64_mix(std::uint64_t z);

// key = mix(seed ^ 0x6A09E667F3BCC909), then key = mix(key ^ tag) per tag.
std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  std::uint64_t at(std::uint64_t i) const {
    return splitmix64_mix(key_ + (i + 1) * 0x9E3779B97F4A7C15ull);
  }
  std::uint64_t next() { return at(counter_++); }

  // Uniform in [0, bound), bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t uniform_index(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

// Fisher-Yates from the back: for i = size-1 .. 1, swap(i, uniform_index(i+1)).
template <typename T>
void shuffle(std::span<T> items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Stream tags.
namespace rng_tag {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kNegatives = 2;
inline constexpr std::uint64_t kBatches = 3;
inline constexpr std::uint64_t kDropout = 4;
inline constexpr std::uint64_t kInit = 5;
inline constexpr std::uint64_t kValidSample = 6;
inline constexpr std::uint64_t kBiasedEval = 7;
}  // namespace rng_tag

}  // namespace gelato
