#ifndef SFR_EQ_HPP
#define SFR_EQ_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "sfr/signal.hpp"

namespace sfr {

// Minimum-phase spectral correction filter, shared by both ears.
struct EQFilter {
  std::vector<double> taps;
  double sampleRate = 48000.0;
  double smoothingFraction = 3.0;  // smoothing bandwidth is 1/fraction octave
  double gainLimit = 20.0;         // dB, symmetric clip on the gain curve
};

// Fractional-octave smoothing of a one-sided power spectrum (length
// nfft/2 + 1). Each bin becomes the mean power over
// [f * 2^(-1/(2 fraction)), f * 2^(1/(2 fraction))]; the DC bin is kept.
std::vector<double> fractionalOctaveSmooth(const std::vector<double>& power,
                                           double sampleRate, double fraction);

// Designs the correction filter that maps `truncated` onto `reference`:
// the gain curve is the square root of the ratio of fractional-octave
// smoothed power spectra (RMS across ears), clipped to +/- gainLimit dB,
// held constant below 50 Hz and above 18 kHz, then realised as a
// minimum-phase FIR via the real cepstrum.
EQFilter designEQ(const BinauralIR& truncated, const BinauralIR& reference,
                  double smoothingFraction = 3.0, double gainLimit = 20.0,
                  std::size_t numTaps = 2048);

// Convolves both ears with the filter; output length = input + taps - 1.
BinauralIR applyEQ(const BinauralIR& input, const EQFilter& filter);

// Magnitude response of the filter at the given frequencies (absolute).
std::vector<double> filterMagnitude(const EQFilter& filter,
                                    const std::vector<double>& frequencies);

void saveEQFilter(const EQFilter& filter, const std::string& path);
EQFilter loadEQFilter(const std::string& path);

}  // namespace sfr

#endif  // SFR_EQ_HPP
