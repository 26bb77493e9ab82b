#ifndef SFR_RENDER_HPP
#define SFR_RENDER_HPP

#include <string>
#include <vector>

#include "sfr/hrtf.hpp"
#include "sfr/room.hpp"
#include "sfr/sh.hpp"
#include "sfr/signal.hpp"

namespace sfr {

// Rendering condition: SH order for the direct component and for the
// reverberant component. Equal orders collapse to uniform-order rendering.
struct RenderCondition {
  std::string name;
  int directOrder = 0;
  int reverbOrder = 0;
};

// Uniform-order binaural rendering: per ear and frequency bin,
//   p = sum_{n<=order} sum_m (-1)^m a_{n,m} h_{n,-m},
// the bilinear SH-domain form whose conjugation placement is fixed by the
// single-plane-wave identity (rendering a unit plane wave from direction d
// against a band-limited HRTF reproduces the HRTF response at d). Direct
// and reverberant channels are summed in the time domain before
// combination. Channels combine in ascending flat-index order.
BinauralIR renderUniform(const SplitSHImpulseResponse& rir, const HRTFSH& hrtf,
                         int order);

// Mixed-order rendering: the direct component rendered at cond.directOrder
// plus the reverberant component at cond.reverbOrder. Equal orders
// delegate to renderUniform, making the collapse sample-exact.
BinauralIR renderMixed(const SplitSHImpulseResponse& rir, const HRTFSH& hrtf,
                       const RenderCondition& cond);

// Reference integrator: numerically integrates per bin and ear
//   p(bin) = sum_j w_j field[j][bin] * hrtf[j][bin]
// over the quadrature grid and inverse-transforms to the time domain.
// Layout: outer index node, inner index frequency bin (full FFT length).
// If bandLimitSum >= 0 it must not exceed grid.maxExactOrder.
BinauralIR quadratureRenderOracle(
    const std::vector<std::vector<cplx>>& fieldBins,
    const std::vector<std::vector<cplx>>& hrtfLeftBins,
    const std::vector<std::vector<cplx>>& hrtfRightBins,
    const QuadratureGrid& grid, double sampleRate, int bandLimitSum = -1);

// One render per head azimuth: renderMixed(rotateAzimuth(rir, -psi), ...).
std::vector<BinauralIR> renderOrientations(const SplitSHImpulseResponse& rir,
                                           const HRTFSH& hrtf,
                                           const RenderCondition& cond,
                                           const std::vector<double>& azimuths);

// Rotate every time sample of both components about the vertical axis.
SplitSHImpulseResponse rotateAzimuth(const SplitSHImpulseResponse& rir,
                                     double delta);

// Full linear convolution of a mono signal with a stereo IR (FFT based),
// output length = signal + ir - 1 per ear.
BinauralIR convolve(const SourceSignal& signal, const BinauralIR& ir);

}  // namespace sfr

#endif  // SFR_RENDER_HPP
