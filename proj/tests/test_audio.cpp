#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "helpers.hpp"
#include "sfr/audio.hpp"
#include "sfr/eq.hpp"
#include "sfr/error.hpp"
#include "sfr/fft.hpp"
#include "sfr/rng.hpp"

using namespace sfr;

namespace {

double burstSlopeDbPerDecade(int seeds) {
  // average the power spectrum over seeds, smooth, then fit level vs log f
  const double rate = 48000.0;
  std::vector<double> avg;
  for (int s = 0; s < seeds; ++s) {
    const SourceSignal sig = pinkBurst(1.0, 0.02, 0.3, 3, 1000 + s, rate);
    const auto spec = rfft(sig.samples);
    if (avg.empty()) avg.assign(spec.size(), 0.0);
    for (std::size_t i = 0; i < spec.size(); ++i) avg[i] += std::norm(spec[i]);
  }
  const auto smooth = fractionalOctaveSmooth(avg, rate, 3.0);
  const double df = rate / (2.0 * (static_cast<double>(avg.size()) - 1.0));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double f = 50.0; f <= 10000.0; f *= std::pow(10.0, 0.05)) {
    const auto b = static_cast<std::size_t>(std::lround(f / df));
    const double x = std::log10(f);
    const double y = 10.0 * std::log10(smooth[b]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("burst envelope geometry") {
  const double rate = 48000.0;
  const auto env = burstEnvelope(1.0, 0.02, 0.3, 3, rate);
  CHECK(env.size() == 3 * 48000 + 2 * 14400);

  const std::size_t fade = 960;
  // raised-cosine fade reaches half the peak at the fade midpoint
  CHECK(env[fade / 2] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(env[fade] == doctest::Approx(1.0).epsilon(1e-12));
  // gaps are silent
  CHECK(env[48000 + 7200] == 0.0);
  // last burst fades back out
  CHECK(env.back() < 1e-3);
  CHECK_THROWS_AS(burstEnvelope(0.01, 0.02, 0.3, 3, rate), Error);
  CHECK_THROWS_AS(burstEnvelope(1.0, 0.02, 0.3, 0, rate), Error);
}

TEST_CASE("pink bursts are deterministic per seed") {
  const SourceSignal a = pinkBurst(0.25, 0.02, 0.1, 2, 99, 48000.0);
  const SourceSignal b = pinkBurst(0.25, 0.02, 0.1, 2, 99, 48000.0);
  const SourceSignal c = pinkBurst(0.25, 0.02, 0.1, 2, 100, 48000.0);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  double peak = 0.0;
  for (double v : a.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("pink burst spectrum falls 10 dB per decade") {
  const double slope = burstSlopeDbPerDecade(5);
  CHECK(slope == doctest::Approx(-10.0).epsilon(0.1));
}

TEST_CASE("float WAV round-trip is lossless for stereo") {
  Rng rng(5);
  BinauralIR ir;
  ir.sampleRate = 48000.0;
  for (int i = 0; i < 1000; ++i) {
    ir.left.push_back(0.9 * rng.nextGaussian() * 0.1);
    ir.right.push_back(0.9 * rng.nextGaussian() * 0.1);
  }
  const std::string path = sfrtest::scratchDir("audio") + "/f32.wav";
  writeWav(path, ir, 32);
  const AudioData back = readWav(path);
  REQUIRE(back.channels.size() == 2);
  CHECK(back.sampleRate == 48000.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < ir.left.size(); ++i) {
    worst = std::max(worst, std::abs(back.channels[0][i] -
                                     static_cast<float>(ir.left[i])));
    worst = std::max(worst, std::abs(back.channels[1][i] -
                                     static_cast<float>(ir.right[i])));
  }
  CHECK(worst == 0.0);
}

TEST_CASE("16 and 24 bit WAVs round-trip within the quantization step") {
  std::vector<std::vector<double>> chans(1);
  for (int i = 0; i < 256; ++i) {
    chans[0].push_back(std::sin(0.02 * i) * 0.7);
  }
  for (int depth : {16, 24}) {
    const std::string path = sfrtest::scratchDir("audio_pcm") + "/pcm.wav";
    writeWav(path, chans, 44100.0, depth);
    const AudioData back = readWav(path);
    REQUIRE(back.channels.size() == 1);
    CHECK(back.sampleRate == 44100.0);
    const double quantum = depth == 16 ? 1.0 / 32767.0 : 1.0 / 8388607.0;
    for (std::size_t i = 0; i < chans[0].size(); ++i) {
      CHECK(std::abs(back.channels[0][i] - chans[0][i]) <= quantum);
    }
  }
}

TEST_CASE("WAV reader rejects junk") {
  const std::string dir = sfrtest::scratchDir("audio_bad");
  CHECK_THROWS_AS(readWav(dir + "/missing.wav"), Error);
  const std::string path = dir + "/bad.wav";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  std::fputs("definitely not a RIFF file", f);
  std::fclose(f);
  CHECK_THROWS_AS(readWav(path), Error);
}

TEST_CASE("rms normalization scales the set to the first signal") {
  auto make = [](double amp, std::size_t n) {
    BinauralIR ir;
    ir.left.assign(n, amp);
    ir.right.assign(n, -amp);
    return ir;
  };
  std::vector<BinauralIR> set;
  set.push_back(make(0.25, 500));
  set.push_back(make(0.5, 500));  // double the reference amplitude
  set.push_back(make(0.1, 300));
  const std::vector<double> gains = rmsNormalize(set);
  REQUIRE(gains.size() == 3);
  CHECK(gains[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gains[1] == doctest::Approx(0.5).epsilon(1e-12));
  const double ref = signalRms(set[0]);
  for (const auto& s : set) {
    CHECK(signalRms(s) == doctest::Approx(ref).epsilon(1e-12));
  }
}
