#include "sfr/sh.hpp"

#include <cmath>
#include <numbers>

namespace sfr {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double wrapAzimuth(double azimuth) {
  double a = std::fmod(azimuth + kPi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a - kPi;
}

Direction makeDirection(double elevation, double azimuth) {
  if (!(elevation >= 0.0 && elevation <= kPi)) {
    fail("invalid-direction", "elevation must lie in [0, pi]");
  }
  return Direction{elevation, wrapAzimuth(azimuth)};
}

std::size_t flatIndex(int n, int m) {
  if (n < 0 || m < -n || m > n) {
    fail("invalid-degree", "require n >= 0 and |m| <= n");
  }
  return static_cast<std::size_t>(n) * n + n + m;
}

namespace {

// Normalized associated Legendre values Pbar_n^m(cos(theta)) for all
// 0 <= m <= n <= order, including the Condon-Shortley phase and the
// orthonormalization factor sqrt((2n+1)(n-m)! / (4pi (n+m)!)), so that
// Y_n^m = Pbar_n^{|m|} e^{i m phi} for m >= 0. Stored at index
// n*(n+1)/2 + m.
void legendreAll(int order, double cosTheta, double sinTheta,
                 std::vector<double>& pbar) {
  pbar.resize(static_cast<std::size_t>(order + 1) * (order + 2) / 2);
  auto at = [&pbar](int n, int m) -> double& {
    return pbar[static_cast<std::size_t>(n) * (n + 1) / 2 + m];
  };
  at(0, 0) = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= order; ++m) {
    at(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sinTheta *
               at(m - 1, m - 1);
  }
  for (int m = 0; m < order; ++m) {
    at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * cosTheta * at(m, m);
  }
  for (int m = 0; m <= order; ++m) {
    for (int n = m + 2; n <= order; ++n) {
      const double a =
          std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - m * m));
      const double b = std::sqrt(
          ((static_cast<double>(n) - 1.0) * (n - 1.0) - m * m) /
          (4.0 * (static_cast<double>(n) - 1.0) * (n - 1.0) - 1.0));
      at(n, m) = a * (cosTheta * at(n - 1, m) - b * at(n - 2, m));
    }
  }
}

}  // namespace

std::vector<cplx> shBasisAll(int order, const Direction& dir) {
  if (order < 0) fail("invalid-degree", "order must be non-negative");
  const double ct = std::cos(dir.elevation);
  const double st = std::sin(dir.elevation);
  std::vector<double> pbar;
  legendreAll(order, ct, st, pbar);

  // e^{i m phi} for m = 0..order by complex multiplication.
  std::vector<cplx> expPos(static_cast<std::size_t>(order) + 1);
  expPos[0] = cplx{1.0, 0.0};
  const cplx w = std::polar(1.0, dir.azimuth);
  for (int m = 1; m <= order; ++m) expPos[m] = expPos[m - 1] * w;

  std::vector<cplx> out(coeffCount(order));
  for (int n = 0; n <= order; ++n) {
    const std::size_t base = static_cast<std::size_t>(n) * n + n;
    const std::size_t prow = static_cast<std::size_t>(n) * (n + 1) / 2;
    out[base] = cplx{pbar[prow], 0.0};
    for (int m = 1; m <= n; ++m) {
      const double p = pbar[prow + m];
      const cplx e = expPos[m];
      out[base + m] = p * e;
      // Y_n^{-m} = (-1)^m conj(Y_n^m).
      const cplx yc = std::conj(out[base + m]);
      out[base - m] = (m % 2 == 0) ? yc : -yc;
    }
  }
  return out;
}

cplx shBasis(int n, int m, const Direction& dir) {
  const std::size_t idx = flatIndex(n, m);
  return shBasisAll(n, dir)[idx];
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre polynomial, seeded with the Chebyshev approximation.
void gaussLegendre(int count, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  nodes.resize(count);
  weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_count(x) and its derivative via the body recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

QuadratureGrid makeGrid(int order) {
  if (order < 0) fail("invalid-degree", "order must be non-negative");
  const int rings = order + 1;
  const int azCount = 2 * order + 2;
  std::vector<double> nodes, glWeights;
  gaussLegendre(rings, nodes, glWeights);

  QuadratureGrid grid;
  grid.maxExactOrder = order;
  grid.directions.reserve(static_cast<std::size_t>(rings) * azCount);
  grid.weights.reserve(static_cast<std::size_t>(rings) * azCount);
  const double azWeight = kTwoPi / azCount;
  for (int i = 0; i < rings; ++i) {
    const double theta = std::acos(nodes[i]);
    for (int k = 0; k < azCount; ++k) {
      const double phi = -kPi + kTwoPi * k / azCount;
      grid.directions.push_back(Direction{theta, phi});
      grid.weights.push_back(glWeights[i] * azWeight);
    }
  }
  return grid;
}

SHCoefficients sft(const std::vector<cplx>& values, const QuadratureGrid& grid,
                   int order) {
  if (order > grid.maxExactOrder) {
    fail("aliasing-risk", "transform order exceeds grid exactness");
  }
  if (values.size() != grid.directions.size()) {
    fail("size-mismatch", "one value per grid node required");
  }
  SHCoefficients coeffs = SHCoefficients::zeros(order);
  for (std::size_t j = 0; j < values.size(); ++j) {
    const std::vector<cplx> y = shBasisAll(order, grid.directions[j]);
    const cplx wf = grid.weights[j] * values[j];
    for (std::size_t i = 0; i < coeffs.data.size(); ++i) {
      coeffs.data[i] += wf * std::conj(y[i]);
    }
  }
  return coeffs;
}

std::vector<cplx> isft(const SHCoefficients& coeffs,
                       const std::vector<Direction>& dirs) {
  std::vector<cplx> out(dirs.size());
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    const std::vector<cplx> y = shBasisAll(coeffs.order, dirs[j]);
    cplx acc{};
    for (std::size_t i = 0; i < coeffs.data.size(); ++i) {
      acc += coeffs.data[i] * y[i];
    }
    out[j] = acc;
  }
  return out;
}

SHCoefficients encodePlaneWave(cplx amplitude, const Direction& dir,
                               int order) {
  SHCoefficients coeffs = SHCoefficients::zeros(order);
  const std::vector<cplx> y = shBasisAll(order, dir);
  for (std::size_t i = 0; i < coeffs.data.size(); ++i) {
    coeffs.data[i] = amplitude * std::conj(y[i]);
  }
  return coeffs;
}

SHCoefficients truncate(const SHCoefficients& coeffs, int newOrder) {
  if (newOrder > coeffs.order || newOrder < 0) {
    fail("invalid-truncation", "newOrder must lie in [0, coeffs.order]");
  }
  SHCoefficients out;
  out.order = newOrder;
  out.data.assign(coeffs.data.begin(),
                  coeffs.data.begin() + coeffCount(newOrder));
  return out;
}

SHCoefficients rotateAzimuth(const SHCoefficients& coeffs, double delta) {
  SHCoefficients out = coeffs;
  for (int n = 0; n <= coeffs.order; ++n) {
    const std::size_t base = static_cast<std::size_t>(n) * n + n;
    for (int m = 1; m <= n; ++m) {
      const cplx f = std::polar(1.0, -m * delta);
      out.data[base + m] *= f;
      out.data[base - m] *= std::conj(f);
    }
  }
  return out;
}

}  // namespace sfr
