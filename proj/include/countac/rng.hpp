#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace countac {

// SplitMix64 step; used for seed mixing and child-stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent child seed from a base seed and up to three stream
// indices. Identical inputs always yield the identical child seed, which is
// what makes batch sampling reproducible regardless of thread scheduling.
std::uint64_t child_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0);

// Deterministic random source. All draws go through u01() so the sequence of
// consumed engine outputs is fixed by the call sequence alone; mt19937_64 and
// the 53-bit mapping below are fully specified, so results are identical
// across platforms and build configurations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Uniform double in [0, 1) with 53 random bits.
  double u01();

  // Binomial(n, p) by inverse transform anchored at the distribution mode.
  // Exact (up to double rounding) for all n; expected cost O(sqrt(n p (1-p))).
  std::int64_t binomial(std::int64_t n, double p);

  // Splits n into out[k] ~ Multinomial(n, p) via sequential binomial
  // conditioning. p need not be exactly normalized; zero-probability cells
  // always receive zero counts.
  void multinomial(std::int64_t n, std::span<const double> p,
                   std::span<std::int64_t> out);

  // Single draw from an unnormalized discrete distribution.
  int categorical(std::span<const double> p);

 private:
  std::mt19937_64 eng_;
};

}  // namespace countac
