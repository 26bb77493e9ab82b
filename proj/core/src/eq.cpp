#include "sfr/eq.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sfr/error.hpp"
#include "sfr/fft.hpp"
#include "sfr/sh.hpp"

namespace sfr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHoldBelowHz = 50.0;
constexpr double kHoldAboveHz = 18000.0;

std::vector<double> onesidedPower(const std::vector<double>& left,
                                  const std::vector<double>& right,
                                  std::size_t nfft) {
  std::vector<double> padded(nfft, 0.0);
  std::copy(left.begin(), left.end(), padded.begin());
  std::vector<cplx> specL = rfft(padded);
  std::fill(padded.begin(), padded.end(), 0.0);
  std::copy(right.begin(), right.end(), padded.begin());
  std::vector<cplx> specR = rfft(padded);
  std::vector<double> power(specL.size());
  for (std::size_t b = 0; b < power.size(); ++b) {
    power[b] = 0.5 * (std::norm(specL[b]) + std::norm(specR[b]));
  }
  return power;
}

double channelEnergy(const BinauralIR& ir) {
  double e = 0.0;
  for (double v : ir.left) e += v * v;
  for (double v : ir.right) e += v * v;
  return e;
}

}  // namespace

std::vector<double> fractionalOctaveSmooth(const std::vector<double>& power,
                                           double sampleRate,
                                           double fraction) {
  if (power.size() < 2) {
    fail("empty-input", "smoothing requires at least two spectrum bins");
  }
  if (fraction <= 0.0 || sampleRate <= 0.0) {
    fail("invalid-argument", "smoothing fraction and rate must be positive");
  }
  const std::size_t nBins = power.size();
  const double halfWidth = std::pow(2.0, 1.0 / (2.0 * fraction));

  std::vector<double> prefix(nBins + 1, 0.0);
  for (std::size_t b = 0; b < nBins; ++b) prefix[b + 1] = prefix[b] + power[b];

  std::vector<double> out(nBins);
  out[0] = power[0];
  for (std::size_t b = 1; b < nBins; ++b) {
    // Band edges in bin units; bin frequency is b * rate / nfft, so the
    // rate cancels and edges reduce to fractions of the bin index.
    const double lo = static_cast<double>(b) / halfWidth;
    const double hi = static_cast<double>(b) * halfWidth;
    std::size_t bLo = static_cast<std::size_t>(std::ceil(lo));
    std::size_t bHi = static_cast<std::size_t>(std::floor(hi));
    if (bLo < 1) bLo = 1;
    if (bHi > nBins - 1) bHi = nBins - 1;
    if (bLo > b) bLo = b;
    if (bHi < b) bHi = b;
    const double sum = prefix[bHi + 1] - prefix[bLo];
    out[b] = sum / static_cast<double>(bHi - bLo + 1);
  }
  return out;
}

EQFilter designEQ(const BinauralIR& truncated, const BinauralIR& reference,
                  double smoothingFraction, double gainLimit,
                  std::size_t numTaps) {
  if (reference.sampleRate != truncated.sampleRate) {
    fail("rate-mismatch", "reference and truncated responses differ in rate");
  }
  if (numTaps < 2) {
    fail("invalid-argument", "filter needs at least two taps");
  }
  if (channelEnergy(reference) <= 0.0 || channelEnergy(truncated) <= 0.0) {
    fail("zero-energy", "cannot equalise a response with no energy");
  }

  const std::size_t maxLen =
      std::max({reference.left.size(), reference.right.size(),
                truncated.left.size(), truncated.right.size()});
  const std::size_t nfft = nextPow2(std::max(16 * numTaps, maxLen));
  const std::size_t nBins = nfft / 2 + 1;
  const double df = reference.sampleRate / static_cast<double>(nfft);

  const std::vector<double> refPow =
      fractionalOctaveSmooth(onesidedPower(reference.left, reference.right, nfft),
                             reference.sampleRate, smoothingFraction);
  const std::vector<double> truncPow =
      fractionalOctaveSmooth(onesidedPower(truncated.left, truncated.right, nfft),
                             truncated.sampleRate, smoothingFraction);

  const double gainMax = std::pow(10.0, gainLimit / 20.0);
  const double gainMin = 1.0 / gainMax;
  std::vector<double> gain(nBins);
  for (std::size_t b = 0; b < nBins; ++b) {
    double g = truncPow[b] > 0.0 ? std::sqrt(refPow[b] / truncPow[b]) : gainMax;
    gain[b] = std::clamp(g, gainMin, gainMax);
  }

  // Hold the curve flat outside the corrected band.
  std::size_t bLow = static_cast<std::size_t>(std::ceil(kHoldBelowHz / df));
  if (bLow > nBins - 1) bLow = nBins - 1;
  std::size_t bHigh = static_cast<std::size_t>(std::floor(kHoldAboveHz / df));
  if (bHigh > nBins - 1) bHigh = nBins - 1;
  for (std::size_t b = 0; b < bLow; ++b) gain[b] = gain[bLow];
  for (std::size_t b = bHigh + 1; b < nBins; ++b) gain[b] = gain[bHigh];

  // Minimum-phase realisation via the real cepstrum of the gain curve.
  std::vector<cplx> logMag(nfft);
  for (std::size_t b = 0; b < nBins; ++b) logMag[b] = cplx(std::log(gain[b]));
  for (std::size_t b = 1; b + 1 < nBins; ++b) logMag[nfft - b] = logMag[b];
  fftInverse(logMag);

  std::vector<cplx> folded(nfft, cplx(0.0));
  folded[0] = cplx(logMag[0].real());
  for (std::size_t i = 1; i < nfft / 2; ++i) {
    folded[i] = cplx(2.0 * logMag[i].real());
  }
  folded[nfft / 2] = cplx(logMag[nfft / 2].real());
  fftForward(folded);
  for (std::size_t i = 0; i < nfft; ++i) folded[i] = std::exp(folded[i]);
  fftInverse(folded);

  EQFilter filter;
  filter.sampleRate = reference.sampleRate;
  filter.smoothingFraction = smoothingFraction;
  filter.gainLimit = gainLimit;
  filter.taps.resize(numTaps);
  for (std::size_t j = 0; j < numTaps; ++j) filter.taps[j] = folded[j].real();
  return filter;
}

BinauralIR applyEQ(const BinauralIR& input, const EQFilter& filter) {
  if (input.sampleRate != filter.sampleRate) {
    fail("rate-mismatch", "filter rate differs from signal rate");
  }
  if (input.left.empty() || input.right.empty() || filter.taps.empty()) {
    fail("empty-input", "equalisation requires non-empty inputs");
  }
  const std::size_t outLen = std::max(input.left.size(), input.right.size()) +
                             filter.taps.size() - 1;
  const std::size_t nfft = nextPow2(outLen);

  std::vector<double> padded(nfft, 0.0);
  std::copy(filter.taps.begin(), filter.taps.end(), padded.begin());
  const std::vector<cplx> tapSpec = rfft(padded);

  BinauralIR out;
  out.sampleRate = input.sampleRate;
  for (int ear = 0; ear < 2; ++ear) {
    const std::vector<double>& chan = (ear == 0) ? input.left : input.right;
    std::fill(padded.begin(), padded.end(), 0.0);
    std::copy(chan.begin(), chan.end(), padded.begin());
    std::vector<cplx> spec = rfft(padded);
    for (std::size_t b = 0; b < spec.size(); ++b) spec[b] *= tapSpec[b];
    std::vector<double> conv = irfft(spec, nfft);
    conv.resize(chan.size() + filter.taps.size() - 1);
    if (ear == 0) {
      out.left = std::move(conv);
    } else {
      out.right = std::move(conv);
    }
  }
  return out;
}

std::vector<double> filterMagnitude(const EQFilter& filter,
                                    const std::vector<double>& frequencies) {
  std::vector<double> out(frequencies.size());
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double w = 2.0 * kPi * frequencies[i] / filter.sampleRate;
    cplx h(0.0);
    for (std::size_t j = 0; j < filter.taps.size(); ++j) {
      h += filter.taps[j] * std::polar(1.0, -w * static_cast<double>(j));
    }
    out[i] = std::abs(h);
  }
  return out;
}

void saveEQFilter(const EQFilter& filter, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("io-error", "cannot open for writing: " + path);
  f << "SFREQ1\n"
    << "taps " << filter.taps.size() << "\n"
    << "rate " << filter.sampleRate << "\n"
    << "fraction " << filter.smoothingFraction << "\n"
    << "limit " << filter.gainLimit << "\n"
    << "data\n";
  std::vector<float> raw(filter.taps.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    raw[j] = static_cast<float>(filter.taps[j]);
  }
  f.write(reinterpret_cast<const char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!f) fail("io-error", "write failed: " + path);
}

EQFilter loadEQFilter(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("io-error", "cannot open: " + path);
  std::string line;
  if (!std::getline(f, line) || line != "SFREQ1") {
    fail("parse-error", path + ": missing SFREQ1 magic line");
  }
  EQFilter filter;
  std::size_t count = 0;
  bool haveCount = false;
  while (std::getline(f, line)) {
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "taps") {
      ls >> count;
      haveCount = true;
    } else if (key == "rate") {
      ls >> filter.sampleRate;
    } else if (key == "fraction") {
      ls >> filter.smoothingFraction;
    } else if (key == "limit") {
      ls >> filter.gainLimit;
    } else {
      fail("parse-error", path + ": unknown header field '" + key + "'");
    }
    if (!ls) fail("parse-error", path + ": malformed header line '" + line + "'");
  }
  if (!haveCount || line != "data") {
    fail("parse-error", path + ": incomplete header");
  }
  std::vector<float> raw(count);
  f.read(reinterpret_cast<char*>(raw.data()),
         static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(f.gcount()) != count * sizeof(float)) {
    fail("parse-error", path + ": truncated tap payload");
  }
  filter.taps.assign(raw.begin(), raw.end());
  return filter;
}

}  // namespace sfr
