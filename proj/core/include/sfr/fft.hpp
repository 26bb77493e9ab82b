#ifndef SFR_FFT_HPP
#define SFR_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace sfr {

// Thin wrappers over the system FFT library. Plans are cached per size and
// reused; all calls are deterministic for fixed inputs.

// In-place complex transforms, unitary pair: inverse includes the 1/N scale.
void fftForward(std::vector<std::complex<double>>& buf);
void fftInverse(std::vector<std::complex<double>>& buf);

// Real-input forward transform; returns n/2+1 non-negative-frequency bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& input);

// Inverse of rfft for an even original length n = 2*(bins-1).
std::vector<double> irfft(const std::vector<std::complex<double>>& spectrum,
                          std::size_t n);

std::size_t nextPow2(std::size_t n);

}  // namespace sfr

#endif  // SFR_FFT_HPP
