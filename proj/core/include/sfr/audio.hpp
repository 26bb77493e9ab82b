#ifndef SFR_AUDIO_HPP
#define SFR_AUDIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sfr/signal.hpp"

namespace sfr {

// Decoded audio file: one vector per channel, samples in [-1, 1] scale.
struct AudioData {
  std::vector<std::vector<double>> channels;
  double sampleRate = 0.0;
};

// Pink-noise repeating burst test signal. Each burst is freshly drawn
// 1/sqrt(f)-shaped noise (FFT method, seeded) with raised-cosine fade-in
// and fade-out, bursts separated by silent pauses:
//   total = repetitions*burstLen + (repetitions-1)*pauseLen.
// Deterministic per seed; peak-normalized to 0.95 full scale.
SourceSignal pinkBurst(double burstLen, double fadeLen, double pauseLen,
                       int repetitions, std::uint64_t seed, double rate);

// The deterministic amplitude envelope pinkBurst applies (peak 1.0),
// exposed so the fade geometry is testable on its own.
std::vector<double> burstEnvelope(double burstLen, double fadeLen,
                                  double pauseLen, int repetitions,
                                  double rate);

// RIFF/WAVE file I/O. Reading supports PCM 16/24-bit and 32-bit float,
// mono or stereo; writing takes bitDepth 16, 24, or 32 (32 = IEEE float).
AudioData readWav(const std::string& path);
void writeWav(const std::string& path,
              const std::vector<std::vector<double>>& channels,
              double sampleRate, int bitDepth);
void writeWav(const std::string& path, const BinauralIR& stereo,
              int bitDepth);

// Scale every signal in the set to the RMS of the first one (the set's
// reference), one scalar gain per signal. Gains are returned; the signals
// are modified in place.
std::vector<double> rmsNormalize(std::vector<BinauralIR>& set);

double signalRms(const BinauralIR& s);
double signalPeak(const BinauralIR& s);

}  // namespace sfr

#endif  // SFR_AUDIO_HPP
