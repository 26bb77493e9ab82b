#include "sfr/hrtf.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sfr/error.hpp"
#include "sfr/rng.hpp"

namespace sfr {

void saveHRTFSet(const HRTFSet& set, const std::string& path) {
  if (set.directions.size() != set.leftIRs.size() ||
      set.directions.size() != set.rightIRs.size()) {
    fail("invalid-hrtf", "direction and IR counts differ");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("io-error", "cannot open for writing: " + path);
  f << "SFRHRTF1\n"
    << "directions " << set.directions.size() << "\n"
    << "irLength " << set.irLength << "\n"
    << "rate " << set.sampleRate << "\n"
    << "table\n";
  f.precision(17);
  for (const Direction& d : set.directions) {
    f << d.elevation << " " << d.azimuth << "\n";
  }
  f << "data\n";
  auto writeBlock = [&f, &set](const std::vector<std::vector<double>>& irs) {
    std::vector<float> buf(set.irLength);
    for (const auto& ir : irs) {
      for (std::size_t i = 0; i < set.irLength; ++i) {
        buf[i] = static_cast<float>(ir[i]);
      }
      f.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
  };
  writeBlock(set.leftIRs);
  writeBlock(set.rightIRs);
  if (!f) fail("io-error", "write failed: " + path);
}

HRTFSet loadHRTFSet(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("io-error", "cannot open: " + path);

  auto parseError = [&f, &path](const std::string& what) {
    const auto off = static_cast<long long>(f.tellg());
    fail("parse-error",
         path + ": " + what + " (byte offset " + std::to_string(off) + ")");
  };

  std::string line;
  if (!std::getline(f, line) || line != "SFRHRTF1") {
    parseError("missing SFRHRTF1 magic line");
  }

  HRTFSet set;
  std::size_t dirCount = 0;
  while (std::getline(f, line)) {
    if (line == "table") break;
    std::istringstream iss(line);
    std::string key;
    iss >> key;
    if (key == "directions") iss >> dirCount;
    else if (key == "irLength") iss >> set.irLength;
    else if (key == "rate") iss >> set.sampleRate;
    else parseError("unknown header key '" + key + "'");
    if (!iss) parseError("malformed header line '" + line + "'");
  }
  if (!(set.sampleRate > 0.0)) {
    fail("unsupported-rate", path + ": sample rate must be positive");
  }
  if (dirCount == 0 || set.irLength == 0) {
    parseError("empty direction table or zero IR length");
  }

  set.directions.reserve(dirCount);
  for (std::size_t i = 0; i < dirCount; ++i) {
    if (!std::getline(f, line)) parseError("direction table truncated");
    std::istringstream iss(line);
    double el = 0.0, az = 0.0;
    iss >> el >> az;
    if (!iss) parseError("malformed direction line '" + line + "'");
    set.directions.push_back(makeDirection(el, az));
  }
  if (!std::getline(f, line) || line != "data") {
    parseError("missing data marker after direction table");
  }

  const std::streampos payloadStart = f.tellg();
  f.seekg(0, std::ios::end);
  const std::streamoff avail = f.tellg() - payloadStart;
  const std::streamoff expected =
      static_cast<std::streamoff>(2 * dirCount * set.irLength * sizeof(float));
  if (avail != expected) {
    fail("parse-error",
         path + ": payload holds " + std::to_string(avail) +
             " bytes, expected " + std::to_string(expected) +
             " (direction/IR count mismatch)");
  }
  f.seekg(payloadStart);

  auto readBlock = [&f, &set, dirCount]() {
    std::vector<std::vector<double>> irs(dirCount);
    std::vector<float> buf(set.irLength);
    for (std::size_t d = 0; d < dirCount; ++d) {
      f.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
      irs[d].assign(buf.begin(), buf.end());
    }
    return irs;
  };
  set.leftIRs = readBlock();
  set.rightIRs = readBlock();
  if (!f) parseError("payload truncated");
  return set;
}

HRTFSH encodeHRTFSH(const HRTFSet& set, int order, double regularization) {
  const std::size_t nc = coeffCount(order);
  const std::size_t nd = set.directions.size();
  if (nd < nc) {
    fail("insufficient-directions",
         "fit at order " + std::to_string(order) + " needs at least " +
             std::to_string(nc) + " directions, got " + std::to_string(nd));
  }
  if (set.leftIRs.size() != nd || set.rightIRs.size() != nd) {
    fail("invalid-hrtf", "direction and IR counts differ");
  }

  // Basis matrix Y (directions x coefficients) and the normal equations
  // A = Y^H Y + lambda I, factorized once and reused for every time sample
  // and both ears.
  Eigen::MatrixXcd Y(nd, nc);
  for (std::size_t d = 0; d < nd; ++d) {
    const std::vector<cplx> row = shBasisAll(order, set.directions[d]);
    for (std::size_t c = 0; c < nc; ++c) Y(d, c) = row[c];
  }
  Eigen::MatrixXcd A = Y.adjoint() * Y;
  if (regularization > 0.0) {
    const double lambda =
        regularization * A.trace().real() / static_cast<double>(nc);
    A.diagonal().array() += lambda;
  }
  const Eigen::LDLT<Eigen::MatrixXcd> solver(A);
  if (solver.info() != Eigen::Success) {
    fail("insufficient-directions", "normal equations are singular");
  }

  HRTFSH out;
  out.order = order;
  out.sampleRate = set.sampleRate;
  out.length = set.irLength;
  out.left.assign(nc * out.length, cplx{});
  out.right.assign(nc * out.length, cplx{});

  Eigen::VectorXcd h(nd), c(nc);
  for (int ear = 0; ear < 2; ++ear) {
    const auto& irs = ear == 0 ? set.leftIRs : set.rightIRs;
    std::vector<cplx>& dest = ear == 0 ? out.left : out.right;
    for (std::size_t t = 0; t < out.length; ++t) {
      for (std::size_t d = 0; d < nd; ++d) h(d) = cplx{irs[d][t], 0.0};
      c = solver.solve(Y.adjoint() * h);
      for (std::size_t k = 0; k < nc; ++k) dest[k * out.length + t] = c(k);
    }
  }
  return out;
}

SyntheticHRTF syntheticHRTF(int order, const QuadratureGrid& grid,
                            std::uint64_t seed, std::size_t irLength) {
  if (grid.maxExactOrder < order) {
    fail("aliasing-risk", "grid is not exact to the requested order");
  }

  SyntheticHRTF result;
  HRTFSH& truth = result.trueCoefficients;
  truth.order = order;
  truth.length = irLength;
  const std::size_t nc = coeffCount(order);
  truth.left.assign(nc * irLength, cplx{});
  truth.right.assign(nc * irLength, cplx{});

  // Fixed draw order (time sample, ear, n, m ascending) so one seed pins
  // the whole set. Coefficients are conjugate-symmetric across +-m so the
  // spatial IRs are real-valued.
  Rng rng(seed);
  for (std::size_t t = 0; t < irLength; ++t) {
    for (int ear = 0; ear < 2; ++ear) {
      std::vector<cplx>& dest = ear == 0 ? truth.left : truth.right;
      for (int n = 0; n <= order; ++n) {
        const std::size_t base = static_cast<std::size_t>(n) * n + n;
        dest[base * irLength + t] = cplx{rng.nextGaussian(), 0.0};
        for (int m = 1; m <= n; ++m) {
          const cplx v{rng.nextGaussian() / std::sqrt(2.0),
                       rng.nextGaussian() / std::sqrt(2.0)};
          dest[(base + m) * irLength + t] = v;
          const cplx vc = std::conj(v);
          dest[(base - m) * irLength + t] = (m % 2 == 0) ? vc : -vc;
        }
      }
    }
  }

  HRTFSet& set = result.set;
  set.sampleRate = truth.sampleRate;
  set.irLength = irLength;
  set.directions = grid.directions;
  const std::size_t nd = grid.directions.size();
  set.leftIRs.assign(nd, std::vector<double>(irLength));
  set.rightIRs.assign(nd, std::vector<double>(irLength));
  for (std::size_t d = 0; d < nd; ++d) {
    const std::vector<cplx> y = shBasisAll(order, grid.directions[d]);
    for (std::size_t t = 0; t < irLength; ++t) {
      cplx accL{}, accR{};
      for (std::size_t k = 0; k < nc; ++k) {
        accL += truth.left[k * irLength + t] * y[k];
        accR += truth.right[k * irLength + t] * y[k];
      }
      set.leftIRs[d][t] = accL.real();
      set.rightIRs[d][t] = accR.real();
    }
  }
  return result;
}

}  // namespace sfr
