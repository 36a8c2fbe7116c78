#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace sketch_sfa {

/// Seedable 64-bit generator. Child streams derived with `derive()` are
/// independent of each other and of the parent, so every component of an
/// experiment can own its own stream and results do not depend on the order
/// in which components consume randomness.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  Rng derive(std::uint64_t stream) const;

  std::uint64_t key() const noexcept { return key_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace sketch_sfa
