#ifndef SFR_TESTS_HELPERS_HPP
#define SFR_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sfr/rng.hpp"
#include "sfr/sh.hpp"

#ifndef SFR_SOURCE_DIR
#error "tests must be compiled with SFR_SOURCE_DIR defined"
#endif

namespace sfrtest {

inline std::string sourcePath(const std::string& rel) {
  return (std::filesystem::path(SFR_SOURCE_DIR) / rel).string();
}

// Fresh per-test scratch directory under the build tree.
inline std::string scratchDir(const std::string& name) {
  const auto dir = std::filesystem::path(SFR_BINARY_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Uniformly distributed direction on the sphere.
inline sfr::Direction randomDirection(sfr::Rng& rng) {
  const double z = 2.0 * rng.nextDouble() - 1.0;
  const double az = 2.0 * std::numbers::pi * rng.nextDouble() - std::numbers::pi;
  return sfr::makeDirection(std::acos(z), az);
}

inline double maxAbsDiff(const std::vector<double>& a,
                         const std::vector<double>& b) {
  double worst = 0.0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double va = i < a.size() ? a[i] : 0.0;
    const double vb = i < b.size() ? b[i] : 0.0;
    worst = std::max(worst, std::abs(va - vb));
  }
  return worst;
}

inline double relEnergyDiff(const std::vector<double>& a,
                            const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double va = i < a.size() ? a[i] : 0.0;
    const double vb = i < b.size() ? b[i] : 0.0;
    num += (va - vb) * (va - vb);
    den += vb * vb;
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace sfrtest

#endif  // SFR_TESTS_HELPERS_HPP
