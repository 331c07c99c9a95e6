#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lrgan {

/// Seedable generator with a fully specified output stream.
///
/// Raw bits come from std::mt19937_64 (whose output sequence is fixed by the
/// standard). uniform() keeps the top 53 bits: (bits >> 11) * 2^-53, in [0, 1).
/// normal() is Box-Muller on a pair (u1, u2) drawn in that order, with
/// u1 <- 1 - uniform() so that it lies in (0, 1]; the cosine branch
/// sqrt(-2 ln u1) cos(2 pi u2) is returned first and the sine branch is cached
/// for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Integer in [0, n) by multiply-shift on the top 53 bits.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a stream tag (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lrgan
