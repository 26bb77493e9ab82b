#ifndef SFR_ROOM_HPP
#define SFR_ROOM_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sfr/sh.hpp"

namespace sfr {

inline constexpr double kSpeedOfSound = 343.0;  // m/s at room temperature

// Shoebox room: dimensions in meters, one frequency-independent pressure
// reflection coefficient shared by all six walls.
struct RoomSpec {
  std::array<double, 3> dimensions{};
  double reflectionCoefficient = 0.0;
  double targetT60 = 0.0;  // informational design value, seconds
};

struct Geometry {
  std::array<double, 3> listenerPosition{};
  double listenerFacing = 0.0;  // azimuth, radians
  std::array<double, 3> sourcePosition{};
};

// One mirrored source: arrival delay, signed gain R^count/(4*pi*d), and
// arrival direction in the listener frame (azimuth relative to facing).
struct ImageSource {
  double delay = 0.0;
  double gain = 0.0;
  Direction direction;
  int reflectionCount = 0;
};

// Time-domain SH impulse response with an exact direct/reverberant
// partition: direct + reverberant reconstructs the full RIR sample-exactly.
// Channel-major storage: channel c occupies [c*length, (c+1)*length).
struct SplitSHImpulseResponse {
  int order = 0;
  double sampleRate = 48000.0;
  std::size_t length = 0;  // samples per channel
  std::vector<cplx> direct;
  std::vector<cplx> reverberant;

  std::size_t channels() const { return coeffCount(order); }
  const cplx* directChannel(std::size_t c) const {
    return direct.data() + c * length;
  }
  const cplx* reverbChannel(std::size_t c) const {
    return reverberant.data() + c * length;
  }
};

// All image sources with delay <= maxTime (Allen-Berkley construction).
// Exactly one has reflectionCount = 0: the direct path.
std::vector<ImageSource> enumerateImages(const RoomSpec& room,
                                         const Geometry& geom,
                                         double maxTime);

// Encode images into a split SH RIR: each image contributes
// gain * (64-tap Hann-windowed sinc at its fractional delay, unit energy)
// * conj(Y_n^m(direction)) to channel (n, m). reflectionCount = 0 goes to
// `direct`, everything else to `reverberant`. Refuses images whose pulse
// would not fit inside `length` seconds.
SplitSHImpulseResponse encodeSHRIR(const std::vector<ImageSource>& images,
                                   int order, double sampleRate,
                                   double length);

inline constexpr int kFractionalDelayTaps = 64;

// Direct-to-reverberant energy ratio in dB, measured on the
// omnidirectional channel with the exact image-source partition.
double analyzeDRR(const SplitSHImpulseResponse& rir);

// T60 via Schroeder backward integration: linear fit of the energy decay
// curve between its -5 dB and -25 dB crossings, extrapolated to 60 dB.
double analyzeT60(const std::vector<double>& omniRIR, double sampleRate);

// Critical distance 0.057 * sqrt(V / T60).
double criticalDistance(const RoomSpec& room, double t60);

// Sabine estimate 0.161 * V / (alpha * S) with alpha = 1 - R^2.
double sabineT60(const RoomSpec& room);

// The two stock acoustic environments: a 15.5 x 9.8 x 7.5 m room with
// R = 0.8, listener at [9, 7, 1.7], source 30 degrees counter-clockwise
// from the listener's facing at 3.315 m (env 1) or 6.63 m (env 2).
// The default facing was calibrated so that the simulated environments
// land on their design targets (DRR -3.5 / -9.5 dB, 6 dB apart);
// see docs/formats.md. Any other facing can be supplied explicitly.
inline constexpr double kDefaultListenerFacingDeg = 353.975;
std::pair<RoomSpec, Geometry> buildEnvironment(int envId);
std::pair<RoomSpec, Geometry> buildEnvironment(int envId, double facing);

// Split SH RIR container I/O (one file per component; layout documented in
// docs/formats.md).
void saveSHRIR(const SplitSHImpulseResponse& rir,
               const std::string& directPath, const std::string& reverbPath);
SplitSHImpulseResponse loadSHRIR(const std::string& directPath,
                                 const std::string& reverbPath);

}  // namespace sfr

#endif  // SFR_ROOM_HPP
