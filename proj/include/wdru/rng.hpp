#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wdru {

/// SplitMix64 used as a counter-based generator: the n-th output (n = 1, 2, ...)
/// is mix(seed + n * 0x9E3779B97F4A7C15), with the standard SplitMix64
/// finalizer. Any implementation of these few lines reproduces the stream.
///
///   uniform()       = (next() >> 11) * 2^-53, in [0, 1)
///   index(n)        = high 64 bits of next() * n
///   normal()        = Box-Muller on (1 - uniform(), uniform()), cosine branch
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next();
  double uniform();
  std::size_t index(std::size_t n);
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Stateless SplitMix64 finalizer, also used to derive per-trial seeds.
std::uint64_t mix64(std::uint64_t z);

/// Seed for trial `trial` of a run with base seed `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial);

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    CounterRng& rng);

}  // namespace wdru
