// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <algorithm>
#include <vector>

namespace speceval {

// splitmix64: tiny deterministic generator used wherever reproducibility
// across platforms matters (std::shuffle and the std distributions are
// implementation-defined, so they are off limits for anything that lands in
// output files).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). Rejection sampling keeps the draw unbiased.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stable per-record seed derivation, so corpus processing can be parallelized
// without changing output.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  SplitMix64 rng(base ^ (0x517cc1b727220a95ull * (salt + 1)));
  return rng.next();
}

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t seed = 0) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace speceval
