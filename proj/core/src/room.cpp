#include "sfr/room.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sfr/error.hpp"

namespace sfr {

namespace {

constexpr double kPi = std::numbers::pi;

void validateGeometry(const RoomSpec& room, const Geometry& geom) {
  for (int i = 0; i < 3; ++i) {
    if (!(room.dimensions[i] > 0.0)) {
      fail("invalid-geometry", "room dimensions must be positive");
    }
    const double l = geom.listenerPosition[i];
    const double s = geom.sourcePosition[i];
    if (!(l > 0.0 && l < room.dimensions[i])) {
      fail("invalid-geometry", "listener outside the room");
    }
    if (!(s > 0.0 && s < room.dimensions[i])) {
      fail("invalid-geometry", "source outside the room");
    }
  }
  if (geom.sourcePosition == geom.listenerPosition) {
    fail("invalid-geometry", "source coincides with the listener");
  }
  if (!(room.reflectionCoefficient >= 0.0 &&
        room.reflectionCoefficient < 1.0)) {
    fail("invalid-geometry", "reflection coefficient must lie in [0, 1)");
  }
}

struct AxisTerm {
  double delta = 0.0;  // image coordinate minus listener coordinate
  int count = 0;       // wall reflections contributed by this axis
};

std::vector<AxisTerm> axisTerms(double source, double listener, double dim,
                                double maxDist) {
  const int nmax =
      static_cast<int>(std::ceil(
          (maxDist + std::abs(source) + std::abs(listener)) / (2.0 * dim))) +
      1;
  std::vector<AxisTerm> terms;
  terms.reserve(2 * (2 * nmax + 1));
  for (int p = 0; p <= 1; ++p) {
    for (int m = -nmax; m <= nmax; ++m) {
      AxisTerm t;
      t.delta = (1.0 - 2.0 * p) * source + 2.0 * m * dim - listener;
      t.count = std::abs(m - p) + std::abs(m);
      terms.push_back(t);
    }
  }
  return terms;
}

}  // namespace

std::vector<ImageSource> enumerateImages(const RoomSpec& room,
                                         const Geometry& geom,
                                         double maxTime) {
  validateGeometry(room, geom);

  double directDist = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = geom.sourcePosition[i] - geom.listenerPosition[i];
    directDist += d * d;
  }
  directDist = std::sqrt(directDist);
  if (!(maxTime > directDist / kSpeedOfSound)) {
    fail("invalid-geometry", "maxTime must exceed the direct path delay");
  }

  const double maxDist = maxTime * kSpeedOfSound;
  const double R = room.reflectionCoefficient;

  std::array<std::vector<AxisTerm>, 3> axes;
  for (int i = 0; i < 3; ++i) {
    axes[i] = axisTerms(geom.sourcePosition[i], geom.listenerPosition[i],
                        room.dimensions[i], maxDist);
  }

  // Precompute R^count once; counts are bounded by the enumeration range.
  int maxCount = 0;
  for (const auto& axis : axes) {
    int axisMax = 0;
    for (const auto& t : axis) axisMax = std::max(axisMax, t.count);
    maxCount += axisMax;
  }
  std::vector<double> rPow(static_cast<std::size_t>(maxCount) + 1, 1.0);
  for (std::size_t k = 1; k < rPow.size(); ++k) rPow[k] = rPow[k - 1] * R;

  std::vector<ImageSource> images;
  for (const AxisTerm& ax : axes[0]) {
    const double dx2 = ax.delta * ax.delta;
    for (const AxisTerm& ay : axes[1]) {
      const double dxy2 = dx2 + ay.delta * ay.delta;
      const int cxy = ax.count + ay.count;
      for (const AxisTerm& az : axes[2]) {
        const double d2 = dxy2 + az.delta * az.delta;
        const double d = std::sqrt(d2);
        const double delay = d / kSpeedOfSound;
        if (delay > maxTime) continue;
        ImageSource img;
        img.delay = delay;
        img.reflectionCount = cxy + az.count;
        img.gain = rPow[img.reflectionCount] / (4.0 * kPi * d);
        const double elev = std::acos(std::clamp(az.delta / d, -1.0, 1.0));
        const double azWorld = std::atan2(ay.delta, ax.delta);
        img.direction =
            Direction{elev, wrapAzimuth(azWorld - geom.listenerFacing)};
        images.push_back(img);
      }
    }
  }
  return images;
}

SplitSHImpulseResponse encodeSHRIR(const std::vector<ImageSource>& images,
                                   int order, double sampleRate,
                                   double length) {
  if (order < 0) fail("invalid-degree", "order must be non-negative");
  if (!(sampleRate > 0.0) || !(length > 0.0)) {
    fail("invalid-size", "sample rate and length must be positive");
  }

  SplitSHImpulseResponse rir;
  rir.order = order;
  rir.sampleRate = sampleRate;
  rir.length = static_cast<std::size_t>(std::lround(length * sampleRate));
  const std::size_t nch = rir.channels();
  rir.direct.assign(nch * rir.length, cplx{});
  rir.reverberant.assign(nch * rir.length, cplx{});

  constexpr int taps = kFractionalDelayTaps;
  constexpr int half = taps / 2;

  // Channels with m >= 0 are accumulated; m < 0 channels follow from the
  // conjugate symmetry of real-gain plane-wave encodings and are filled in
  // a final pass, halving the hot loop.
  std::array<double, taps> pulse{};

  for (const ImageSource& img : images) {
    const double center = img.delay * sampleRate;
    const double base = std::floor(center);
    const long i0 = static_cast<long>(base) - (half - 1);
    if (i0 < 0 || i0 + taps > static_cast<long>(rir.length)) {
      fail("truncation",
           "image pulse does not fit inside the requested RIR length");
    }
    const double frac = center - base;

    double energy = 0.0;
    for (int j = 0; j < taps; ++j) {
      const double t = static_cast<double>(j) - (half - 1) - frac;
      const double w = 0.5 * (1.0 + std::cos(2.0 * kPi * t / taps));
      const double s =
          t == 0.0 ? 1.0 : std::sin(kPi * t) / (kPi * t);
      pulse[j] = s * w;
      energy += pulse[j] * pulse[j];
    }
    const double norm = 1.0 / std::sqrt(energy);
    for (int j = 0; j < taps; ++j) pulse[j] *= norm;

    const std::vector<cplx> y = shBasisAll(order, img.direction);
    std::vector<cplx>& dest =
        img.reflectionCount == 0 ? rir.direct : rir.reverberant;
    for (int n = 0; n <= order; ++n) {
      const std::size_t fbase = static_cast<std::size_t>(n) * n + n;
      for (int m = 0; m <= n; ++m) {
        const cplx coeff = img.gain * std::conj(y[fbase + m]);
        cplx* ch = dest.data() + (fbase + m) * rir.length + i0;
        for (int j = 0; j < taps; ++j) ch[j] += coeff * pulse[j];
      }
    }
  }

  // Mirror: a_{n,-m} = (-1)^m conj(a_{n,m}).
  for (auto* comp : {&rir.direct, &rir.reverberant}) {
    for (int n = 1; n <= order; ++n) {
      const std::size_t fbase = static_cast<std::size_t>(n) * n + n;
      for (int m = 1; m <= n; ++m) {
        const cplx* src = comp->data() + (fbase + m) * rir.length;
        cplx* dst = comp->data() + (fbase - m) * rir.length;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t t = 0; t < rir.length; ++t) {
          dst[t] = sign * std::conj(src[t]);
        }
      }
    }
  }
  return rir;
}

double analyzeDRR(const SplitSHImpulseResponse& rir) {
  double eDir = 0.0, eRev = 0.0;
  const cplx* d = rir.directChannel(0);
  const cplx* r = rir.reverbChannel(0);
  for (std::size_t t = 0; t < rir.length; ++t) {
    eDir += std::norm(d[t]);
    eRev += std::norm(r[t]);
  }
  if (!(eRev > 0.0)) fail("undefined-DRR", "zero reverberant energy");
  return 10.0 * std::log10(eDir / eRev);
}

double analyzeT60(const std::vector<double>& omniRIR, double sampleRate) {
  if (omniRIR.size() < 2) fail("insufficient-length", "RIR too short");

  // Schroeder backward integration, normalized to its start value.
  std::vector<double> edc(omniRIR.size());
  double acc = 0.0;
  for (std::size_t i = omniRIR.size(); i-- > 0;) {
    acc += omniRIR[i] * omniRIR[i];
    edc[i] = acc;
  }
  if (!(edc[0] > 0.0)) fail("insufficient-length", "silent RIR");

  std::size_t i5 = edc.size(), i25 = edc.size();
  for (std::size_t i = 0; i < edc.size(); ++i) {
    const double db = 10.0 * std::log10(edc[i] / edc[0]);
    if (i5 == edc.size() && db <= -5.0) i5 = i;
    if (db <= -25.0) {
      i25 = i;
      break;
    }
  }
  if (i5 >= edc.size() || i25 >= edc.size() || i25 - i5 < 2) {
    fail("insufficient-length", "decay does not reach the -5..-25 dB range");
  }

  // Least-squares line through the EDC (dB) on [i5, i25).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(i25 - i5);
  for (std::size_t i = i5; i < i25; ++i) {
    const double x = static_cast<double>(i) / sampleRate;
    const double y = 10.0 * std::log10(edc[i] / edc[0]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0.0)) fail("insufficient-length", "EDC is not decaying");
  return -60.0 / slope;
}

double criticalDistance(const RoomSpec& room, double t60) {
  if (!(t60 > 0.0)) fail("invalid-argument", "t60 must be positive");
  const double volume =
      room.dimensions[0] * room.dimensions[1] * room.dimensions[2];
  return 0.057 * std::sqrt(volume / t60);
}

double sabineT60(const RoomSpec& room) {
  const auto& d = room.dimensions;
  const double volume = d[0] * d[1] * d[2];
  const double surface = 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
  const double alpha =
      1.0 - room.reflectionCoefficient * room.reflectionCoefficient;
  if (!(alpha > 0.0)) fail("invalid-argument", "fully reflective room");
  return 0.161 * volume / (alpha * surface);
}

std::pair<RoomSpec, Geometry> buildEnvironment(int envId) {
  return buildEnvironment(envId, kDefaultListenerFacingDeg * kPi / 180.0);
}

std::pair<RoomSpec, Geometry> buildEnvironment(int envId, double facing) {
  if (envId != 1 && envId != 2) {
    fail("invalid-argument", "environment id must be 1 or 2");
  }
  RoomSpec room;
  room.dimensions = {15.5, 9.8, 7.5};
  room.reflectionCoefficient = 0.8;
  room.targetT60 = 0.75;

  Geometry geom;
  geom.listenerPosition = {9.0, 7.0, 1.7};
  geom.listenerFacing = wrapAzimuth(facing);
  const double dist = envId == 1 ? 3.315 : 6.63;
  const double az = facing + kPi / 6.0;  // source 30 degrees CCW of facing
  geom.sourcePosition = {geom.listenerPosition[0] + dist * std::cos(az),
                         geom.listenerPosition[1] + dist * std::sin(az),
                         geom.listenerPosition[2]};
  return {room, geom};
}

namespace {

void writeComponent(const SplitSHImpulseResponse& rir, bool direct,
                    const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("io-error", "cannot open for writing: " + path);
  f << "SFRIR1\n"
    << "order " << rir.order << "\n"
    << "rate " << rir.sampleRate << "\n"
    << "channels " << rir.channels() << "\n"
    << "samples " << rir.length << "\n"
    << "component " << (direct ? "direct" : "reverberant") << "\n"
    << "data\n";
  const std::vector<cplx>& src = direct ? rir.direct : rir.reverberant;
  // Interleaved by sample frame: per sample, per channel, (re, im) floats.
  const std::size_t nch = rir.channels();
  std::vector<float> frame(2 * nch);
  for (std::size_t t = 0; t < rir.length; ++t) {
    for (std::size_t c = 0; c < nch; ++c) {
      const cplx v = src[c * rir.length + t];
      frame[2 * c] = static_cast<float>(v.real());
      frame[2 * c + 1] = static_cast<float>(v.imag());
    }
    f.write(reinterpret_cast<const char*>(frame.data()),
            static_cast<std::streamsize>(frame.size() * sizeof(float)));
  }
  if (!f) fail("io-error", "write failed: " + path);
}

struct ComponentHeader {
  int order = 0;
  double rate = 0.0;
  std::size_t channels = 0;
  std::size_t samples = 0;
  std::string component;
  std::streampos payload;
};

ComponentHeader readHeader(std::ifstream& f, const std::string& path) {
  ComponentHeader h;
  std::string line;
  if (!std::getline(f, line) || line != "SFRIR1") {
    fail("parse-error", path + ": missing SFRIR1 magic line");
  }
  while (std::getline(f, line)) {
    if (line == "data") break;
    std::istringstream iss(line);
    std::string key;
    iss >> key;
    if (key == "order") iss >> h.order;
    else if (key == "rate") iss >> h.rate;
    else if (key == "channels") iss >> h.channels;
    else if (key == "samples") iss >> h.samples;
    else if (key == "component") iss >> h.component;
    else fail("parse-error", path + ": unknown header key '" + key + "'");
    if (!iss) fail("parse-error", path + ": malformed header line '" + line + "'");
  }
  if (h.channels != coeffCount(h.order)) {
    fail("parse-error", path + ": channel count does not match order");
  }
  h.payload = f.tellg();
  return h;
}

void readPayload(std::ifstream& f, const std::string& path,
                 const ComponentHeader& h, std::vector<cplx>& dest) {
  dest.assign(h.channels * h.samples, cplx{});
  std::vector<float> frame(2 * h.channels);
  for (std::size_t t = 0; t < h.samples; ++t) {
    f.read(reinterpret_cast<char*>(frame.data()),
           static_cast<std::streamsize>(frame.size() * sizeof(float)));
    if (!f) fail("parse-error", path + ": truncated payload");
    for (std::size_t c = 0; c < h.channels; ++c) {
      dest[c * h.samples + t] = cplx{frame[2 * c], frame[2 * c + 1]};
    }
  }
}

}  // namespace

void saveSHRIR(const SplitSHImpulseResponse& rir,
               const std::string& directPath, const std::string& reverbPath) {
  writeComponent(rir, true, directPath);
  writeComponent(rir, false, reverbPath);
}

SplitSHImpulseResponse loadSHRIR(const std::string& directPath,
                                 const std::string& reverbPath) {
  std::ifstream fd(directPath, std::ios::binary);
  if (!fd) fail("io-error", "cannot open: " + directPath);
  std::ifstream fr(reverbPath, std::ios::binary);
  if (!fr) fail("io-error", "cannot open: " + reverbPath);

  const ComponentHeader hd = readHeader(fd, directPath);
  const ComponentHeader hr = readHeader(fr, reverbPath);
  if (hd.component != "direct" || hr.component != "reverberant") {
    fail("parse-error", "component tags do not match the requested roles");
  }
  if (hd.order != hr.order || hd.rate != hr.rate || hd.samples != hr.samples) {
    fail("parse-error", "direct and reverberant headers disagree");
  }

  SplitSHImpulseResponse rir;
  rir.order = hd.order;
  rir.sampleRate = hd.rate;
  rir.length = hd.samples;
  readPayload(fd, directPath, hd, rir.direct);
  readPayload(fr, reverbPath, hr, rir.reverberant);
  return rir;
}

}  // namespace sfr
