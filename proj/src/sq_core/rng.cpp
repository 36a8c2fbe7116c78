#include "sketch_sfa/sq_core/rng.hpp"

namespace sketch_sfa {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : key_(splitmix64(seed)), engine_(key_) {}

Rng Rng::derive(std::uint64_t stream) const {
  Rng child;
  child.key_ = splitmix64(key_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
  child.engine_.seed(child.key_);
  return child;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection; unbiased.
  std::uint64_t x = engine_();
  auto m = static_cast<u128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<u128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() { return normal_(engine_); }

}  // namespace sketch_sfa
