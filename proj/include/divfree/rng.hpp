#pragma once

#include <cstdint>
#include <string_view>

namespace divfree {

// Counter-based random stream built on SplitMix64: the i-th value of a
// stream is mix(key + i * GOLDEN). No hidden state beyond the counter, so
// sequences are identical on every platform and independent streams can be
// derived from (seed, label) pairs. Datasets and weight draws depend on
// this generator; do not change the mixing constants.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream_label)
      : key_(derive_key(seed, stream_label)) {}

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 significant bits
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // uniform integer in [0, bound) via rejection-free scaling (bound << 2^64,
  // bias is negligible for the small bounds used here)
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  static std::uint64_t derive_key(std::uint64_t seed, std::string_view label) {
    // FNV-1a over the label, folded with the seed through one SplitMix round
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    std::uint64_t z = seed ^ h;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace divfree
