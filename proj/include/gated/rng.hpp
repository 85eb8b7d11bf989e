#pragma once
// Seeded, platform-independent randomness.
//
// Integer stream: xoshiro256** with its state expanded from the 64-bit seed
// by splitmix64. Uniform reals take the top 53 bits. Gaussian draws use the
// Marsaglia polar method, caching the second variate of each accepted pair.

#include <cstdint>
#include <optional>
#include <string_view>

#include "gated/numerics.hpp"

namespace gated {

/// Identifier written into file metadata so a reader knows how draws were made.
inline constexpr std::string_view kRngDescription = "xoshiro256starstar+polar";
inline constexpr std::uint8_t kGaussianMethodPolar = 1;

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p);
  /// Standard normal.
  double gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  std::optional<double> spare_;
};

/// n independent draws of N(mean, sigma^2). sigma < 0 is rejected.
Vector rng_draw_gaussian(Rng& rng, double mean, double sigma, std::size_t n);

/// Fills every entry with N(mean, sigma^2) draws in storage order.
Matrix random_gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, double sigma);

}  // namespace gated
