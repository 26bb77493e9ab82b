#include "sfr/render.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "sfr/error.hpp"
#include "sfr/fft.hpp"

namespace sfr {

namespace {

void checkRenderInputs(const SplitSHImpulseResponse& rir, const HRTFSH& hrtf,
                       int order) {
  if (order < 0 || order > rir.order || order > hrtf.order) {
    fail("order-mismatch",
         "render order " + std::to_string(order) +
             " not available (impulse response order " +
             std::to_string(rir.order) + ", receiver order " +
             std::to_string(hrtf.order) + ")");
  }
  if (rir.sampleRate != hrtf.sampleRate) {
    fail("rate-mismatch", "impulse response rate " +
                              std::to_string(rir.sampleRate) +
                              " differs from receiver rate " +
                              std::to_string(hrtf.sampleRate));
  }
  if (rir.length == 0 || hrtf.length == 0) {
    fail("empty-input", "render requires non-empty impulse responses");
  }
}

// Accumulates one component's contribution into the per-ear spectra:
// per bin, acc += (-1)^m A_{n,m} H_{n,-m}, channels visited in ascending
// flat-index order. When both flags are set the two components are summed
// per sample before transformation.
void accumulateComponent(const SplitSHImpulseResponse& rir, bool useDirect,
                         bool useReverb, int order, const HRTFSH& hrtf,
                         std::vector<cplx>& accLeft,
                         std::vector<cplx>& accRight) {
  const std::size_t nfft = accLeft.size();
  std::vector<cplx> rirBuf(nfft);
  std::vector<cplx> hLeft(nfft);
  std::vector<cplx> hRight(nfft);
  for (int n = 0; n <= order; ++n) {
    for (int m = -n; m <= n; ++m) {
      const auto k = static_cast<std::size_t>(flatIndex(n, m));
      const auto pair = static_cast<std::size_t>(flatIndex(n, -m));
      const double sign = (m % 2 != 0) ? -1.0 : 1.0;

      const cplx* d = rir.directChannel(k);
      const cplx* r = rir.reverbChannel(k);
      if (useDirect && useReverb) {
        for (std::size_t t = 0; t < rir.length; ++t) rirBuf[t] = d[t] + r[t];
      } else if (useDirect) {
        for (std::size_t t = 0; t < rir.length; ++t) rirBuf[t] = d[t];
      } else {
        for (std::size_t t = 0; t < rir.length; ++t) rirBuf[t] = r[t];
      }
      for (std::size_t t = rir.length; t < nfft; ++t) rirBuf[t] = cplx(0.0);
      fftForward(rirBuf);

      const cplx* hl = hrtf.leftChannel(pair);
      const cplx* hr = hrtf.rightChannel(pair);
      for (std::size_t t = 0; t < hrtf.length; ++t) {
        hLeft[t] = hl[t];
        hRight[t] = hr[t];
      }
      for (std::size_t t = hrtf.length; t < nfft; ++t) {
        hLeft[t] = cplx(0.0);
        hRight[t] = cplx(0.0);
      }
      fftForward(hLeft);
      fftForward(hRight);

      for (std::size_t b = 0; b < nfft; ++b) {
        accLeft[b] += rirBuf[b] * hLeft[b] * sign;
        accRight[b] += rirBuf[b] * hRight[b] * sign;
      }
    }
  }
}

BinauralIR spectraToTime(std::vector<cplx>& accLeft, std::vector<cplx>& accRight,
                         std::size_t outLen, double sampleRate) {
  fftInverse(accLeft);
  fftInverse(accRight);
  BinauralIR out;
  out.sampleRate = sampleRate;
  out.left.resize(outLen);
  out.right.resize(outLen);
  for (std::size_t t = 0; t < outLen; ++t) {
    out.left[t] = accLeft[t].real();
    out.right[t] = accRight[t].real();
  }
  return out;
}

}  // namespace

BinauralIR renderUniform(const SplitSHImpulseResponse& rir, const HRTFSH& hrtf,
                         int order) {
  checkRenderInputs(rir, hrtf, order);
  const std::size_t outLen = rir.length + hrtf.length - 1;
  const std::size_t nfft = nextPow2(outLen);
  std::vector<cplx> accLeft(nfft, cplx(0.0));
  std::vector<cplx> accRight(nfft, cplx(0.0));
  accumulateComponent(rir, true, true, order, hrtf, accLeft, accRight);
  return spectraToTime(accLeft, accRight, outLen, rir.sampleRate);
}

BinauralIR renderMixed(const SplitSHImpulseResponse& rir, const HRTFSH& hrtf,
                       const RenderCondition& cond) {
  if (cond.directOrder == cond.reverbOrder) {
    return renderUniform(rir, hrtf, cond.directOrder);
  }
  checkRenderInputs(rir, hrtf, cond.directOrder);
  checkRenderInputs(rir, hrtf, cond.reverbOrder);
  const std::size_t outLen = rir.length + hrtf.length - 1;
  const std::size_t nfft = nextPow2(outLen);
  std::vector<cplx> accLeft(nfft, cplx(0.0));
  std::vector<cplx> accRight(nfft, cplx(0.0));
  accumulateComponent(rir, true, false, cond.directOrder, hrtf, accLeft,
                      accRight);
  accumulateComponent(rir, false, true, cond.reverbOrder, hrtf, accLeft,
                      accRight);
  return spectraToTime(accLeft, accRight, outLen, rir.sampleRate);
}

BinauralIR quadratureRenderOracle(
    const std::vector<std::vector<cplx>>& fieldBins,
    const std::vector<std::vector<cplx>>& hrtfLeftBins,
    const std::vector<std::vector<cplx>>& hrtfRightBins,
    const QuadratureGrid& grid, double sampleRate, int bandLimitSum) {
  if (bandLimitSum >= 0 && bandLimitSum > grid.maxExactOrder) {
    fail("aliasing-risk",
         "grid exact to order " + std::to_string(grid.maxExactOrder) +
             " cannot integrate a product of band limit " +
             std::to_string(bandLimitSum));
  }
  const std::size_t nodes = grid.directions.size();
  if (fieldBins.size() != nodes || hrtfLeftBins.size() != nodes ||
      hrtfRightBins.size() != nodes) {
    fail("size-mismatch", "per-node spectra must match the grid node count");
  }
  if (nodes == 0 || fieldBins[0].empty()) {
    fail("empty-input", "reference integration requires non-empty spectra");
  }
  const std::size_t nfft = fieldBins[0].size();
  for (std::size_t j = 0; j < nodes; ++j) {
    if (fieldBins[j].size() != nfft || hrtfLeftBins[j].size() != nfft ||
        hrtfRightBins[j].size() != nfft) {
      fail("size-mismatch", "per-node spectra must share one bin count");
    }
  }
  std::vector<cplx> accLeft(nfft, cplx(0.0));
  std::vector<cplx> accRight(nfft, cplx(0.0));
  for (std::size_t j = 0; j < nodes; ++j) {
    const double w = grid.weights[j];
    const cplx* f = fieldBins[j].data();
    const cplx* hl = hrtfLeftBins[j].data();
    const cplx* hr = hrtfRightBins[j].data();
    for (std::size_t b = 0; b < nfft; ++b) {
      accLeft[b] += f[b] * hl[b] * w;
      accRight[b] += f[b] * hr[b] * w;
    }
  }
  return spectraToTime(accLeft, accRight, nfft, sampleRate);
}

SplitSHImpulseResponse rotateAzimuth(const SplitSHImpulseResponse& rir,
                                     double delta) {
  SplitSHImpulseResponse out = rir;
  if (delta == 0.0) return out;
  for (int n = 1; n <= rir.order; ++n) {
    for (int m = 1; m <= n; ++m) {
      const cplx factor = std::polar(1.0, -m * delta);
      const cplx factorNeg = std::conj(factor);
      const auto kPos = static_cast<std::size_t>(flatIndex(n, m));
      const auto kNeg = static_cast<std::size_t>(flatIndex(n, -m));
      cplx* dPos = out.direct.data() + kPos * out.length;
      cplx* dNeg = out.direct.data() + kNeg * out.length;
      cplx* rPos = out.reverberant.data() + kPos * out.length;
      cplx* rNeg = out.reverberant.data() + kNeg * out.length;
      for (std::size_t t = 0; t < out.length; ++t) {
        dPos[t] *= factor;
        dNeg[t] *= factorNeg;
        rPos[t] *= factor;
        rNeg[t] *= factorNeg;
      }
    }
  }
  return out;
}

std::vector<BinauralIR> renderOrientations(
    const SplitSHImpulseResponse& rir, const HRTFSH& hrtf,
    const RenderCondition& cond, const std::vector<double>& azimuths) {
  std::vector<BinauralIR> out;
  out.reserve(azimuths.size());
  for (double psi : azimuths) {
    const SplitSHImpulseResponse rotated = rotateAzimuth(rir, -psi);
    out.push_back(renderMixed(rotated, hrtf, cond));
  }
  return out;
}

BinauralIR convolve(const SourceSignal& signal, const BinauralIR& ir) {
  if (signal.sampleRate != ir.sampleRate) {
    fail("rate-mismatch",
         "signal rate " + std::to_string(signal.sampleRate) +
             " differs from impulse response rate " +
             std::to_string(ir.sampleRate));
  }
  if (signal.samples.empty() || ir.left.empty() || ir.right.empty()) {
    fail("empty-input", "convolution requires non-empty inputs");
  }
  const std::size_t irLen = ir.left.size();
  if (ir.right.size() != irLen) {
    fail("size-mismatch", "stereo impulse response channels differ in length");
  }
  const std::size_t outLen = signal.samples.size() + irLen - 1;
  const std::size_t nfft = nextPow2(outLen);

  std::vector<double> padded(nfft, 0.0);
  std::copy(signal.samples.begin(), signal.samples.end(), padded.begin());
  const std::vector<cplx> sigSpec = rfft(padded);

  BinauralIR out;
  out.sampleRate = signal.sampleRate;
  for (int ear = 0; ear < 2; ++ear) {
    const std::vector<double>& irChan = (ear == 0) ? ir.left : ir.right;
    std::fill(padded.begin(), padded.end(), 0.0);
    std::copy(irChan.begin(), irChan.end(), padded.begin());
    std::vector<cplx> spec = rfft(padded);
    for (std::size_t b = 0; b < spec.size(); ++b) spec[b] *= sigSpec[b];
    std::vector<double> conv = irfft(spec, nfft);
    conv.resize(outLen);
    if (ear == 0) {
      out.left = std::move(conv);
    } else {
      out.right = std::move(conv);
    }
  }
  return out;
}

}  // namespace sfr
