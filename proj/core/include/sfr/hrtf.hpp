#ifndef SFR_HRTF_HPP
#define SFR_HRTF_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sfr/sh.hpp"

namespace sfr {

// Direction-indexed head-related impulse responses, one left/right pair
// per measured direction.
struct HRTFSet {
  std::vector<Direction> directions;
  std::vector<std::vector<double>> leftIRs;
  std::vector<std::vector<double>> rightIRs;
  double sampleRate = 48000.0;
  std::size_t irLength = 0;
};

// SH-encoded HRTF: per time sample, one coefficient vector per ear.
// Channel-major storage like SplitSHImpulseResponse: channel c occupies
// [c*length, (c+1)*length).
struct HRTFSH {
  int order = 0;
  double sampleRate = 48000.0;
  std::size_t length = 0;
  std::vector<cplx> left;
  std::vector<cplx> right;

  std::size_t channels() const { return coeffCount(order); }
  const cplx* leftChannel(std::size_t c) const {
    return left.data() + c * length;
  }
  const cplx* rightChannel(std::size_t c) const {
    return right.data() + c * length;
  }
};

// Native HRTF container (text header + direction table + float32 payload,
// documented in docs/formats.md).
HRTFSet loadHRTFSet(const std::string& path);
void saveHRTFSet(const HRTFSet& set, const std::string& path);

// Regularized least-squares fit of SH coefficients to the measured IRs,
// solved once per time sample per ear against a shared factorization.
// `regularization` scales relative to the basis Gram matrix trace; 0 gives
// a plain least-squares fit. Requires at least (order+1)^2 directions.
HRTFSH encodeHRTFSH(const HRTFSet& set, int order, double regularization);

inline constexpr double kDefaultHRTFRegularization = 1e-6;

// Seeded band-limited synthetic HRTF: draws conjugate-symmetric SH
// coefficients per time sample and ear, evaluates them on the grid
// directions, and returns both the sampled set and the ground truth.
struct SyntheticHRTF {
  HRTFSet set;
  HRTFSH trueCoefficients;
};
SyntheticHRTF syntheticHRTF(int order, const QuadratureGrid& grid,
                            std::uint64_t seed, std::size_t irLength = 64);

}  // namespace sfr

#endif  // SFR_HRTF_HPP
