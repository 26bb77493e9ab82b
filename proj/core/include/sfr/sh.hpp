#ifndef SFR_SH_HPP
#define SFR_SH_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "sfr/error.hpp"

namespace sfr {

using cplx = std::complex<double>;

// Direction on the sphere. Elevation is measured downward from the zenith
// axis in [0, pi]; azimuth counter-clockwise from the reference axis in the
// horizontal plane, normalized to [-pi, pi).
struct Direction {
  double elevation = 0.0;
  double azimuth = 0.0;
};

// Construct a Direction, normalizing azimuth into [-pi, pi). Elevation
// outside [0, pi] is rejected.
Direction makeDirection(double elevation, double azimuth);

// Azimuth wrapped into [-pi, pi).
double wrapAzimuth(double azimuth);

// Flat coefficient vector over all (n, m) with 0 <= n <= order and
// |m| <= n, flat index n^2 + n + m (ACN ordering).
struct SHCoefficients {
  int order = 0;
  std::vector<cplx> data;

  static SHCoefficients zeros(int order) {
    SHCoefficients c;
    c.order = order;
    c.data.assign(static_cast<std::size_t>(order + 1) * (order + 1), cplx{});
    return c;
  }
};

inline std::size_t coeffCount(int order) {
  return static_cast<std::size_t>(order + 1) * (order + 1);
}

// Flat index n^2 + n + m. Rejects |m| > n or n < 0.
std::size_t flatIndex(int n, int m);

// Orthonormal complex spherical harmonic Y_n^m with Condon-Shortley phase.
// Satisfies conj(Y_n^m) = (-1)^m Y_n^{-m}.
cplx shBasis(int n, int m, const Direction& dir);

// All basis values up to `order` at one direction, flat-indexed. One
// Legendre recurrence pass, much cheaper than per-(n,m) calls.
std::vector<cplx> shBasisAll(int order, const Direction& dir);

// Quadrature grid: node directions with positive weights summing to 4*pi.
// Integrates products of spherical harmonics exactly (to rounding) when
// both factors have order <= maxExactOrder.
struct QuadratureGrid {
  std::vector<Direction> directions;
  std::vector<double> weights;
  int maxExactOrder = 0;
};

// Gauss-Legendre (elevation) x uniform (azimuth) grid with (order+1) rings
// of (2*order+2) azimuths.
QuadratureGrid makeGrid(int order);

// Forward spherical Fourier transform: c_nm = sum_j w_j f(d_j) conj(Y_n^m).
// Requires order <= grid.maxExactOrder and one value per node.
SHCoefficients sft(const std::vector<cplx>& values, const QuadratureGrid& grid,
                   int order);

// Inverse spherical Fourier transform evaluated at arbitrary directions.
std::vector<cplx> isft(const SHCoefficients& coeffs,
                       const std::vector<Direction>& dirs);

// Plane-wave encoding: coefficient (n, m) = amplitude * conj(Y_n^m(dir)).
SHCoefficients encodePlaneWave(cplx amplitude, const Direction& dir,
                               int order);

// Drop all coefficients with n > newOrder.
SHCoefficients truncate(const SHCoefficients& coeffs, int newOrder);

// Rotate the represented field by `delta` about the vertical axis: a
// plane-wave encoding at azimuth phi maps exactly to the encoding at
// phi + delta. Coefficient (n, m) is scaled by exp(-i*m*delta); m = 0
// channels are untouched bit-exactly.
SHCoefficients rotateAzimuth(const SHCoefficients& coeffs, double delta);

}  // namespace sfr

#endif  // SFR_SH_HPP
