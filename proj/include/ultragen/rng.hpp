#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace ultragen {

// Counter-based random stream: output i of stream s under seed k is
// mix(key(k, s) + i * GOLDEN), i.e. a splitmix64 sequence whose origin is
// derived from (seed, stream). Draws are reproducible and independent across
// streams, so replications can run in parallel with disjoint stream ids.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_key(seed, stream)) {}

  static std::uint64_t value_at(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t counter) {
    return mix(derive_key(seed, stream) + counter * kGolden);
  }

  std::uint64_t next_u64() { return mix(key_ + (counter_++) * kGolden); }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_exponential(double rate) { return -std::log1p(-next_unit()) / rate; }

  // Uniform in {0, ..., n-1}, unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Uniform unordered pair {i, j}, 0 <= i < j < n.
  std::pair<int, int> next_pair(int n) {
    int i = static_cast<int>(next_below(static_cast<std::uint64_t>(n)));
    int j = static_cast<int>(next_below(static_cast<std::uint64_t>(n) - 1));
    if (j >= i) ++j;
    return {std::min(i, j), std::max(i, j)};
  }

  bool next_coin() { return (next_u64() & 1u) != 0; }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed + kGolden) ^ mix(stream + 0x6a09e667f3bcc909ull));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ultragen
