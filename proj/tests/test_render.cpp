#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "sfr/error.hpp"
#include "sfr/fft.hpp"
#include "sfr/hrtf.hpp"
#include "sfr/render.hpp"
#include "sfr/rng.hpp"
#include "sfr/room.hpp"
#include "sfr/sh.hpp"

using namespace sfr;

namespace {

// Impulse at t = 0 carrying a unit plane-wave encoding from `dir`, in the
// direct component.
SplitSHImpulseResponse planeWaveRIR(const Direction& dir, int order,
                                    std::size_t length, double rate) {
  SplitSHImpulseResponse rir;
  rir.order = order;
  rir.sampleRate = rate;
  rir.length = length;
  rir.direct.assign(coeffCount(order) * length, cplx{});
  rir.reverberant.assign(coeffCount(order) * length, cplx{});
  const SHCoefficients enc = encodePlaneWave(cplx{1.0, 0.0}, dir, order);
  for (std::size_t c = 0; c < enc.data.size(); ++c) {
    rir.direct[c * length] = enc.data[c];
  }
  return rir;
}

// The receiver's response evaluated at one direction, per ear, time domain.
std::vector<double> receiverAt(const HRTFSH& hrtf, const Direction& dir,
                               bool leftEar) {
  const std::vector<cplx> basis = shBasisAll(hrtf.order, dir);
  std::vector<double> out(hrtf.length, 0.0);
  for (std::size_t t = 0; t < hrtf.length; ++t) {
    cplx acc{};
    for (std::size_t c = 0; c < hrtf.channels(); ++c) {
      acc += basis[c] *
             (leftEar ? hrtf.leftChannel(c)[t] : hrtf.rightChannel(c)[t]);
    }
    out[t] = acc.real();
  }
  return out;
}

SplitSHImpulseResponse envRIR(int order, double maxTime, double length) {
  const auto [room, geom] = buildEnvironment(1);
  return encodeSHRIR(enumerateImages(room, geom, maxTime), order, 48000.0,
                     length);
}

}  // namespace

TEST_CASE("rendering a plane wave reproduces the receiver response at it") {
  const int order = 3;
  const QuadratureGrid grid = makeGrid(order);
  const HRTFSH hrtf = syntheticHRTF(order, grid, 314, 16).trueCoefficients;

  Rng rng(2026);
  for (int trial = 0; trial < 8; ++trial) {
    const Direction d = sfrtest::randomDirection(rng);
    const SplitSHImpulseResponse rir = planeWaveRIR(d, order, 32, 48000.0);
    const BinauralIR out = renderUniform(rir, hrtf, order);
    REQUIRE(out.left.size() == 32 + 16 - 1);

    const std::vector<double> wantL = receiverAt(hrtf, d, true);
    const std::vector<double> wantR = receiverAt(hrtf, d, false);
    double worst = 0.0;
    for (std::size_t t = 0; t < out.left.size(); ++t) {
      const double wl = t < wantL.size() ? wantL[t] : 0.0;
      const double wr = t < wantR.size() ? wantR[t] : 0.0;
      worst = std::max(worst, std::abs(out.left[t] - wl));
      worst = std::max(worst, std::abs(out.right[t] - wr));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("equal-order mixed rendering is the uniform render, bit for bit") {
  const SplitSHImpulseResponse rir = envRIR(3, 0.02, 0.03);
  const HRTFSH hrtf = syntheticHRTF(3, makeGrid(3), 5, 32).trueCoefficients;
  const BinauralIR mixed = renderMixed(rir, hrtf, {"m", 3, 3});
  const BinauralIR uniform = renderUniform(rir, hrtf, 3);
  CHECK(mixed.left == uniform.left);
  CHECK(mixed.right == uniform.right);
}

TEST_CASE("mixed rendering splits into per-component uniform renders") {
  const SplitSHImpulseResponse rir = envRIR(3, 0.02, 0.03);
  const HRTFSH hrtf = syntheticHRTF(3, makeGrid(3), 6, 32).trueCoefficients;

  SplitSHImpulseResponse directOnly = rir;
  std::fill(directOnly.reverberant.begin(), directOnly.reverberant.end(),
            cplx{});
  SplitSHImpulseResponse reverbOnly = rir;
  std::fill(reverbOnly.direct.begin(), reverbOnly.direct.end(), cplx{});

  const BinauralIR mixed = renderMixed(rir, hrtf, {"m", 3, 1});
  const BinauralIR d3 = renderUniform(directOnly, hrtf, 3);
  const BinauralIR r1 = renderUniform(reverbOnly, hrtf, 1);

  double worst = 0.0;
  for (std::size_t t = 0; t < mixed.left.size(); ++t) {
    worst = std::max(worst, std::abs(mixed.left[t] - d3.left[t] - r1.left[t]));
    worst =
        std::max(worst, std::abs(mixed.right[t] - d3.right[t] - r1.right[t]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("impulse-response rotation moves plane waves and is identity at 0") {
  const Direction d = makeDirection(1.2, 0.7);
  const SplitSHImpulseResponse rir = planeWaveRIR(d, 4, 16, 48000.0);

  const SplitSHImpulseResponse same = rotateAzimuth(rir, 0.0);
  CHECK(same.direct == rir.direct);
  CHECK(same.reverberant == rir.reverberant);

  const double delta = 0.9;
  const SplitSHImpulseResponse rotated = rotateAzimuth(rir, delta);
  const SplitSHImpulseResponse target =
      planeWaveRIR(makeDirection(d.elevation, d.azimuth + delta), 4, 16,
                   48000.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < rotated.direct.size(); ++i) {
    worst = std::max(worst, std::abs(rotated.direct[i] - target.direct[i]));
  }
  CHECK(worst < 1e-12);

  // m = 0 channels never change, bit for bit
  for (int n = 0; n <= 4; ++n) {
    const std::size_t c = flatIndex(n, 0);
    for (std::size_t t = 0; t < rir.length; ++t) {
      CHECK(rotated.directChannel(c)[t] == rir.directChannel(c)[t]);
    }
  }
}

TEST_CASE("orientation sweep equals rendering the counter-rotated scene") {
  const int order = 3;
  const HRTFSH hrtf = syntheticHRTF(order, makeGrid(order), 8, 16)
                          .trueCoefficients;
  const Direction d = makeDirection(1.4, 0.3);
  const SplitSHImpulseResponse rir = planeWaveRIR(d, order, 32, 48000.0);

  const double psi = std::numbers::pi / 2.0;
  const std::vector<BinauralIR> outs =
      renderOrientations(rir, hrtf, {"o", order, order}, {0.0, psi});

  const BinauralIR base = renderUniform(rir, hrtf, order);
  CHECK(outs[0].left == base.left);
  CHECK(outs[0].right == base.right);

  // turning the head by psi is hearing the source at azimuth - psi
  const SplitSHImpulseResponse moved =
      planeWaveRIR(makeDirection(d.elevation, d.azimuth - psi), order, 32,
                   48000.0);
  const BinauralIR want = renderUniform(moved, hrtf, order);
  CHECK(sfrtest::maxAbsDiff(outs[1].left, want.left) < 1e-9);
  CHECK(sfrtest::maxAbsDiff(outs[1].right, want.right) < 1e-9);
}

TEST_CASE("SH-domain render agrees with direct quadrature integration") {
  const int order = 4;
  const SplitSHImpulseResponse rir = envRIR(order, 0.012, 0.015);
  const HRTFSH hrtf =
      syntheticHRTF(order, makeGrid(order), 21, 32).trueCoefficients;
  const BinauralIR shDomain = renderUniform(rir, hrtf, order);

  const QuadratureGrid grid = makeGrid(2 * order);
  const std::size_t nfft = nextPow2(rir.length + hrtf.length - 1);
  const std::size_t nodes = grid.directions.size();
  std::vector<std::vector<cplx>> fieldBins(nodes), leftBins(nodes),
      rightBins(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const std::vector<cplx> basis = shBasisAll(order, grid.directions[j]);
    std::vector<cplx> f(nfft, cplx{}), hl(nfft, cplx{}), hr(nfft, cplx{});
    for (std::size_t c = 0; c < coeffCount(order); ++c) {
      for (std::size_t t = 0; t < rir.length; ++t) {
        f[t] += basis[c] * (rir.directChannel(c)[t] + rir.reverbChannel(c)[t]);
      }
      for (std::size_t t = 0; t < hrtf.length; ++t) {
        hl[t] += basis[c] * hrtf.leftChannel(c)[t];
        hr[t] += basis[c] * hrtf.rightChannel(c)[t];
      }
    }
    fftForward(f);
    fftForward(hl);
    fftForward(hr);
    fieldBins[j] = std::move(f);
    leftBins[j] = std::move(hl);
    rightBins[j] = std::move(hr);
  }

  const BinauralIR numeric = quadratureRenderOracle(
      fieldBins, leftBins, rightBins, grid, 48000.0, 2 * order);
  CHECK(sfrtest::relEnergyDiff(shDomain.left, numeric.left) < 1e-6);
  CHECK(sfrtest::relEnergyDiff(shDomain.right, numeric.right) < 1e-6);

  CHECK_THROWS_AS(quadratureRenderOracle(fieldBins, leftBins, rightBins, grid,
                                         48000.0, 2 * order + 1),
                  Error);
  fieldBins.pop_back();
  CHECK_THROWS_AS(quadratureRenderOracle(fieldBins, leftBins, rightBins, grid,
                                         48000.0, 2 * order),
                  Error);
}

TEST_CASE("FFT convolution matches the quadratic form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  SourceSignal sig;
  sig.samples.resize(97);
  for (double& v : sig.samples) v = uni(rng);
  BinauralIR ir;
  ir.left.resize(23);
  ir.right.resize(23);
  for (double& v : ir.left) v = uni(rng);
  for (double& v : ir.right) v = uni(rng);

  const BinauralIR fast = convolve(sig, ir);
  REQUIRE(fast.left.size() == 97 + 23 - 1);
  std::vector<double> slowL(fast.left.size(), 0.0), slowR(slowL);
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    for (std::size_t j = 0; j < ir.left.size(); ++j) {
      slowL[i + j] += sig.samples[i] * ir.left[j];
      slowR[i + j] += sig.samples[i] * ir.right[j];
    }
  }
  CHECK(sfrtest::maxAbsDiff(fast.left, slowL) < 1e-10);
  CHECK(sfrtest::maxAbsDiff(fast.right, slowR) < 1e-10);

  SourceSignal offRate = sig;
  offRate.sampleRate = 44100.0;
  CHECK_THROWS_AS(convolve(offRate, ir), Error);
  SourceSignal empty;
  CHECK_THROWS_AS(convolve(empty, ir), Error);
}

TEST_CASE("render input validation") {
  const SplitSHImpulseResponse rir = envRIR(2, 0.01, 0.02);
  const HRTFSH hrtf = syntheticHRTF(2, makeGrid(2), 9, 16).trueCoefficients;
  CHECK_THROWS_AS(renderUniform(rir, hrtf, 3), Error);
  CHECK_THROWS_AS(renderUniform(rir, hrtf, -1), Error);
  HRTFSH offRate = hrtf;
  offRate.sampleRate = 44100.0;
  CHECK_THROWS_AS(renderUniform(rir, offRate, 2), Error);
}
