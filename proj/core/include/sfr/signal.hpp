#ifndef SFR_SIGNAL_HPP
#define SFR_SIGNAL_HPP

#include <string>
#include <vector>

namespace sfr {

// Two-channel audio buffer. Used both for binaural impulse responses and
// for rendered stereo program material.
struct BinauralIR {
  std::vector<double> left;
  std::vector<double> right;
  double sampleRate = 48000.0;
};

// Mono source signal (generated or loaded from file).
struct SourceSignal {
  std::vector<double> samples;
  double sampleRate = 48000.0;
  std::string label;
};

}  // namespace sfr

#endif  // SFR_SIGNAL_HPP
