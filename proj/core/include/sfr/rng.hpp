#ifndef SFR_RNG_HPP
#define SFR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sfr {

// Portable seeded generator (splitmix64 update rule, documented in
// docs/formats.md) so that generated test signals are reproducible across
// platforms from the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t nextU64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double nextDouble() {
    return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one fresh pair per two calls.
  double nextGaussian() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    double u1 = nextDouble();
    double u2 = nextDouble();
    while (u1 <= 0.0) u1 = nextDouble();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    haveSpare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool haveSpare_ = false;
};

}  // namespace sfr

#endif  // SFR_RNG_HPP
