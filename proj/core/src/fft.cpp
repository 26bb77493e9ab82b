#include "sfr/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "sfr/error.hpp"

namespace sfr {

namespace {

// FFTW's planner is not thread-safe; executing a cached plan on new buffers
// via the *_dft variants is. One lock guards plan creation and lookup.
std::mutex planMutex;

fftw_plan cachedComplexPlan(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planMutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> tmp(n);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

fftw_plan cachedR2CPlan(std::size_t n) {
  static std::map<std::size_t, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planMutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> in(n);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(
      static_cast<int>(n), in.data(),
      reinterpret_cast<fftw_complex*>(out.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, plan);
  return plan;
}

fftw_plan cachedC2RPlan(std::size_t n) {
  static std::map<std::size_t, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planMutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> in(n / 2 + 1);
  std::vector<double> out(n);
  fftw_plan plan = fftw_plan_dft_c2r_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
      out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, plan);
  return plan;
}

}  // namespace

void fftForward(std::vector<std::complex<double>>& buf) {
  if (buf.empty()) fail("invalid-size", "empty FFT buffer");
  fftw_plan plan = cachedComplexPlan(buf.size(), FFTW_FORWARD);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plan, p, p);
}

void fftInverse(std::vector<std::complex<double>>& buf) {
  if (buf.empty()) fail("invalid-size", "empty FFT buffer");
  fftw_plan plan = cachedComplexPlan(buf.size(), FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plan, p, p);
  const double scale = 1.0 / static_cast<double>(buf.size());
  for (auto& v : buf) v *= scale;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& input) {
  if (input.empty()) fail("invalid-size", "empty FFT buffer");
  std::vector<double> in = input;
  std::vector<std::complex<double>> out(input.size() / 2 + 1);
  fftw_plan plan = cachedR2CPlan(input.size());
  fftw_execute_dft_r2c(plan, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spectrum,
                          std::size_t n) {
  if (spectrum.size() != n / 2 + 1 || n % 2 != 0) {
    fail("invalid-size", "spectrum size must be n/2+1 for even n");
  }
  std::vector<std::complex<double>> in = spectrum;  // c2r destroys input
  std::vector<double> out(n);
  fftw_plan plan = cachedC2RPlan(n);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

std::size_t nextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace sfr
