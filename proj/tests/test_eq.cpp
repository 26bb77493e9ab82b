#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "sfr/eq.hpp"
#include "sfr/error.hpp"
#include "sfr/fft.hpp"

using namespace sfr;

namespace {

BinauralIR whiteNoisePair(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  BinauralIR out;
  out.left.resize(length);
  out.right.resize(length);
  for (double& v : out.left) v = uni(rng);
  for (double& v : out.right) v = uni(rng);
  return out;
}

std::vector<double> logSpacedFrequencies(double lo, double hi, int count) {
  std::vector<double> f(count);
  for (int i = 0; i < count; ++i) {
    f[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return f;
}

// Apply a slowly varying spectral tilt (in dB, as a function of log
// frequency) to both ears.
BinauralIR tilted(const BinauralIR& in, double tiltDb) {
  const std::size_t nfft = nextPow2(in.left.size());
  BinauralIR out = in;
  for (int ear = 0; ear < 2; ++ear) {
    std::vector<double>& chan = ear == 0 ? out.left : out.right;
    std::vector<double> padded(nfft, 0.0);
    std::copy(chan.begin(), chan.end(), padded.begin());
    std::vector<cplx> spec = rfft(padded);
    for (std::size_t b = 1; b < spec.size(); ++b) {
      const double f = static_cast<double>(b) * in.sampleRate / nfft;
      const double db =
          tiltDb * std::sin(std::numbers::pi * std::log2(f / 1000.0) / 4.0);
      spec[b] *= std::pow(10.0, db / 20.0);
    }
    std::vector<double> shaped = irfft(spec, nfft);
    shaped.resize(chan.size());
    chan = shaped;
  }
  return out;
}

}  // namespace

TEST_CASE("matching inputs design a unity filter") {
  const BinauralIR x = whiteNoisePair(4096, 1);
  const EQFilter f = designEQ(x, x);
  const std::vector<double> mags =
      filterMagnitude(f, logSpacedFrequencies(50.0, 20000.0, 64));
  for (double m : mags) {
    CHECK(std::abs(20.0 * std::log10(m)) < 0.01);
  }
}

TEST_CASE("a uniform 6 dB deficit designs a 6 dB boost, holds included") {
  const BinauralIR ref = whiteNoisePair(4096, 2);
  BinauralIR half = ref;
  for (double& v : half.left) v *= 0.5;
  for (double& v : half.right) v *= 0.5;
  const EQFilter f = designEQ(half, ref);
  // constant curves survive the band holds, so probe outside them too
  const std::vector<double> mags =
      filterMagnitude(f, logSpacedFrequencies(20.0, 23000.0, 64));
  for (double m : mags) {
    CHECK(20.0 * std::log10(m) == doctest::Approx(6.0206).epsilon(0.01));
  }
}

TEST_CASE("gain curve clips at the configured limit") {
  const BinauralIR ref = whiteNoisePair(4096, 3);
  BinauralIR tiny = ref;
  for (double& v : tiny.left) v *= 1e-3;   // would need +60 dB
  for (double& v : tiny.right) v *= 1e-3;
  const EQFilter f = designEQ(tiny, ref, 3.0, 20.0);
  const std::vector<double> mags =
      filterMagnitude(f, logSpacedFrequencies(100.0, 10000.0, 32));
  for (double m : mags) {
    CHECK(20.0 * std::log10(m) == doctest::Approx(20.0).epsilon(0.01));
  }
}

TEST_CASE("one pass flattens a slow spectral tilt to half a dB") {
  const BinauralIR ref = whiteNoisePair(16384, 4);
  const BinauralIR skewed = tilted(ref, 6.0);
  const EQFilter f = designEQ(skewed, ref);
  const BinauralIR fixed = applyEQ(skewed, f);
  const EQFilter residual = designEQ(fixed, ref);
  const std::vector<double> mags =
      filterMagnitude(residual, logSpacedFrequencies(60.0, 16000.0, 48));
  for (double m : mags) {
    CHECK(std::abs(20.0 * std::log10(m)) < 0.5);
  }
}

TEST_CASE("both ears get the same filter, so level differences survive") {
  BinauralIR in = whiteNoisePair(2048, 5);
  in.right = in.left;
  for (double& v : in.right) v *= 2.0;
  const BinauralIR ref = whiteNoisePair(2048, 6);
  const EQFilter f = designEQ(in, ref);
  const BinauralIR out = applyEQ(in, f);
  double worst = 0.0;
  for (std::size_t t = 0; t < out.left.size(); ++t) {
    worst = std::max(worst, std::abs(out.right[t] - 2.0 * out.left[t]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("fractional-octave smoothing basics") {
  const double rate = 48000.0;
  std::vector<double> flat(8193, 3.5);
  const std::vector<double> sf = fractionalOctaveSmooth(flat, rate, 3.0);
  for (double v : sf) CHECK(v == doctest::Approx(3.5).epsilon(1e-12));

  std::vector<double> spike(8193, 0.0);
  spike[0] = 7.0;
  spike[1000] = 1.0;
  const std::vector<double> ss = fractionalOctaveSmooth(spike, rate, 3.0);
  CHECK(ss[0] == 7.0);            // DC bin passes through
  CHECK(ss[1000] < spike[1000]);  // peaks flatten

  // band mass of an interior spike is nearly conserved:
  // sum over bins of the smeared spike integrates the 1/width kernel,
  // which analytically gives ln(k^2)/(k - 1/k) with k = 2^(1/6)
  double mass = 0.0;
  for (std::size_t b = 1; b < ss.size(); ++b) mass += ss[b];
  const double k = std::pow(2.0, 1.0 / 6.0);
  CHECK(mass == doctest::Approx(std::log(k * k) / (k - 1.0 / k)).epsilon(0.01));

  CHECK_THROWS_AS(fractionalOctaveSmooth({1.0}, rate, 3.0), Error);
  CHECK_THROWS_AS(fractionalOctaveSmooth(flat, rate, 0.0), Error);
}

TEST_CASE("filter container round-trips") {
  const BinauralIR ref = whiteNoisePair(4096, 8);
  const EQFilter f = designEQ(tilted(ref, 3.0), ref, 6.0, 12.0, 512);
  CHECK(f.taps.size() == 512);
  const std::string dir = sfrtest::scratchDir("eq_io");
  const std::string path = dir + "/f.sfreq";
  saveEQFilter(f, path);
  const EQFilter back = loadEQFilter(path);
  CHECK(back.sampleRate == f.sampleRate);
  CHECK(back.smoothingFraction == f.smoothingFraction);
  CHECK(back.gainLimit == f.gainLimit);
  REQUIRE(back.taps.size() == f.taps.size());
  for (std::size_t i = 0; i < f.taps.size(); ++i) {
    CHECK(back.taps[i] == static_cast<float>(f.taps[i]));
  }
  CHECK_THROWS_AS(loadEQFilter(dir + "/missing.sfreq"), Error);
  {
    std::FILE* junk = std::fopen((dir + "/junk.sfreq").c_str(), "wb");
    std::fputs("SFREQ9\nnot really\n", junk);
    std::fclose(junk);
  }
  CHECK_THROWS_AS(loadEQFilter(dir + "/junk.sfreq"), Error);
}

TEST_CASE("design input validation") {
  const BinauralIR ref = whiteNoisePair(1024, 9);
  BinauralIR offRate = ref;
  offRate.sampleRate = 44100.0;
  CHECK_THROWS_AS(designEQ(offRate, ref), Error);
  CHECK_THROWS_AS(designEQ(ref, ref, 3.0, 20.0, 1), Error);
  BinauralIR silent = ref;
  std::fill(silent.left.begin(), silent.left.end(), 0.0);
  std::fill(silent.right.begin(), silent.right.end(), 0.0);
  CHECK_THROWS_AS(designEQ(silent, ref), Error);
}
