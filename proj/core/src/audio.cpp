#include "sfr/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include "sfr/error.hpp"
#include "sfr/fft.hpp"
#include "sfr/rng.hpp"

namespace sfr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void putU32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void putU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

std::uint32_t getU32(const std::string& d, std::size_t off) {
  return static_cast<std::uint8_t>(d[off]) |
         (static_cast<std::uint8_t>(d[off + 1]) << 8) |
         (static_cast<std::uint8_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(d[off + 3]))
          << 24);
}

std::uint16_t getU16(const std::string& d, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<std::uint8_t>(d[off]) |
                                    (static_cast<std::uint8_t>(d[off + 1])
                                     << 8));
}

}  // namespace

std::vector<double> burstEnvelope(double burstLen, double fadeLen,
                                  double pauseLen, int repetitions,
                                  double rate) {
  if (rate <= 0.0 || burstLen <= 0.0 || fadeLen < 0.0 || pauseLen < 0.0 ||
      repetitions < 1 || 2.0 * fadeLen > burstLen) {
    fail("invalid-duration",
         "require burstLen > 0, 2*fadeLen <= burstLen, pauseLen >= 0, "
         "repetitions >= 1");
  }
  const std::size_t burst = static_cast<std::size_t>(std::lround(burstLen * rate));
  const std::size_t fade = static_cast<std::size_t>(std::lround(fadeLen * rate));
  const std::size_t pause = static_cast<std::size_t>(std::lround(pauseLen * rate));
  const std::size_t total =
      static_cast<std::size_t>(repetitions) * burst +
      static_cast<std::size_t>(repetitions - 1) * pause;

  std::vector<double> env(total, 0.0);
  for (int r = 0; r < repetitions; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * (burst + pause);
    for (std::size_t i = 0; i < burst; ++i) {
      double w = 1.0;
      if (fade > 0 && i < fade) {
        w = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(fade)));
      } else if (fade > 0 && i >= burst - fade) {
        const std::size_t k = burst - 1 - i;
        w = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) /
                                  static_cast<double>(fade)));
      }
      env[off + i] = w;
    }
  }
  return env;
}

SourceSignal pinkBurst(double burstLen, double fadeLen, double pauseLen,
                       int repetitions, std::uint64_t seed, double rate) {
  const std::vector<double> env =
      burstEnvelope(burstLen, fadeLen, pauseLen, repetitions, rate);
  const std::size_t burst = static_cast<std::size_t>(std::lround(burstLen * rate));
  const std::size_t pause = static_cast<std::size_t>(std::lround(pauseLen * rate));

  SourceSignal sig;
  sig.sampleRate = rate;
  sig.label = "pink";
  sig.samples.assign(env.size(), 0.0);

  Rng rng(seed);
  // Shaping starts at 40 Hz. Bins below that are infrasonic rumble no
  // playback chain reproduces, and they would dominate the 1/f power budget.
  const double lowEdgeHz = 40.0;
  for (int r = 0; r < repetitions; ++r) {
    // Fresh 1/sqrt(f) spectrum per burst: random phase per positive bin,
    // Hermitian mirror, zero DC so each burst is mean-free.
    std::vector<std::complex<double>> spec(burst, std::complex<double>{});
    const std::size_t half = burst / 2;
    for (std::size_t k = 1; k <= half; ++k) {
      if (static_cast<double>(k) * rate / static_cast<double>(burst) < lowEdgeHz) {
        continue;
      }
      const double mag = 1.0 / std::sqrt(static_cast<double>(k));
      const double phase = kTwoPi * rng.nextDouble();
      std::complex<double> v = std::polar(mag, phase);
      if (burst % 2 == 0 && k == half) v = std::complex<double>(mag, 0.0);
      spec[k] = v;
      if (k < burst - k) spec[burst - k] = std::conj(v);
    }
    fftInverse(spec);
    const std::size_t off = static_cast<std::size_t>(r) * (burst + pause);
    for (std::size_t i = 0; i < burst; ++i) {
      sig.samples[off + i] = spec[i].real() * env[off + i];
    }
  }

  double peak = 0.0;
  for (double v : sig.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double g = 0.95 / peak;
    for (double& v : sig.samples) v *= g;
  }
  return sig;
}

void writeWav(const std::string& path,
              const std::vector<std::vector<double>>& channels,
              double sampleRate, int bitDepth) {
  if (channels.empty() || channels[0].empty()) {
    fail("invalid-audio", "no samples to write");
  }
  for (const auto& c : channels) {
    if (c.size() != channels[0].size()) {
      fail("invalid-audio", "channel lengths differ");
    }
  }
  if (bitDepth != 16 && bitDepth != 24 && bitDepth != 32) {
    fail("unsupported-format", "bitDepth must be 16, 24, or 32 (float)");
  }

  const std::uint16_t nch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t frames = static_cast<std::uint32_t>(channels[0].size());
  const std::uint16_t bytesPer = static_cast<std::uint16_t>(bitDepth / 8);
  const std::uint32_t dataSize = frames * nch * bytesPer;
  const bool isFloat = bitDepth == 32;

  std::string out;
  out.reserve(dataSize + 64);
  out += "RIFF";
  const std::uint32_t fmtSize = isFloat ? 18 : 16;
  const std::uint32_t factSize = isFloat ? (8 + 4) : 0;
  putU32(out, 4 + (8 + fmtSize) + factSize + (8 + dataSize));
  out += "WAVE";
  out += "fmt ";
  putU32(out, fmtSize);
  putU16(out, isFloat ? 3 : 1);
  putU16(out, nch);
  putU32(out, static_cast<std::uint32_t>(std::lround(sampleRate)));
  putU32(out, static_cast<std::uint32_t>(std::lround(sampleRate)) * nch *
                  bytesPer);
  putU16(out, static_cast<std::uint16_t>(nch * bytesPer));
  putU16(out, static_cast<std::uint16_t>(bitDepth));
  if (isFloat) {
    putU16(out, 0);  // cbSize
    out += "fact";
    putU32(out, 4);
    putU32(out, frames);
  }
  out += "data";
  putU32(out, dataSize);

  for (std::uint32_t i = 0; i < frames; ++i) {
    for (std::uint16_t c = 0; c < nch; ++c) {
      const double x = channels[c][i];
      if (bitDepth == 16) {
        long v = std::lround(x * 32768.0);
        v = std::clamp(v, -32768l, 32767l);
        putU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
      } else if (bitDepth == 24) {
        long v = std::lround(x * 8388608.0);
        v = std::clamp(v, -8388608l, 8388607l);
        const std::uint32_t u = static_cast<std::uint32_t>(v);
        out.push_back(static_cast<char>(u & 0xFF));
        out.push_back(static_cast<char>((u >> 8) & 0xFF));
        out.push_back(static_cast<char>((u >> 16) & 0xFF));
      } else {
        const float f = static_cast<float>(x);
        char b[4];
        std::memcpy(b, &f, 4);
        out.append(b, 4);
      }
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) fail("io-error", "cannot open for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail("io-error", "write failed: " + path);
}

void writeWav(const std::string& path, const BinauralIR& stereo,
              int bitDepth) {
  writeWav(path, {stereo.left, stereo.right}, stereo.sampleRate, bitDepth);
}

AudioData readWav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail("io-error", "cannot open: " + path);
  std::string d((std::istreambuf_iterator<char>(file)),
                std::istreambuf_iterator<char>());

  auto parseError = [&path](std::size_t offset, const std::string& what) {
    fail("parse-error",
         path + ": " + what + " (byte offset " + std::to_string(offset) + ")");
  };

  if (d.size() < 12) parseError(0, "file shorter than RIFF header");
  if (d.compare(0, 4, "RIFF") != 0) parseError(0, "missing RIFF tag");
  if (d.compare(8, 4, "WAVE") != 0) parseError(8, "missing WAVE tag");

  std::uint16_t format = 0, nch = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t dataOff = 0, dataSize = 0;
  bool haveFmt = false, haveData = false;

  std::size_t pos = 12;
  while (pos + 8 <= d.size()) {
    const std::string id = d.substr(pos, 4);
    const std::uint32_t size = getU32(d, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > d.size()) parseError(pos, "chunk '" + id + "' overruns file");
    if (id == "fmt ") {
      if (size < 16) parseError(pos, "fmt chunk too small");
      format = getU16(d, body);
      nch = getU16(d, body + 2);
      rate = getU32(d, body + 4);
      bits = getU16(d, body + 14);
      if (format == 0xFFFE) {
        // WAVE_FORMAT_EXTENSIBLE: real format code leads the GUID.
        if (size < 40) parseError(pos, "extensible fmt chunk too small");
        format = getU16(d, body + 24);
      }
      haveFmt = true;
    } else if (id == "data") {
      dataOff = body;
      dataSize = size;
      haveData = true;
    }
    pos = body + size + (size % 2);  // chunks are word-aligned
  }

  if (!haveFmt) parseError(12, "missing fmt chunk");
  if (!haveData) parseError(12, "missing data chunk");
  if (nch < 1 || nch > 2) {
    fail("unsupported-format",
         path + ": " + std::to_string(nch) + " channels (mono or stereo only)");
  }
  const bool pcm16 = format == 1 && bits == 16;
  const bool pcm24 = format == 1 && bits == 24;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !pcm24 && !f32) {
    fail("unsupported-format",
         path + ": fmt tag " + std::to_string(format) + " at " +
             std::to_string(bits) + " bits (supported: PCM 16/24, float 32)");
  }

  const std::size_t bytesPer = bits / 8;
  const std::size_t frames = dataSize / (bytesPer * nch);
  AudioData audio;
  audio.sampleRate = rate;
  audio.channels.assign(nch, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < nch; ++c) {
      const std::size_t off = dataOff + (i * nch + c) * bytesPer;
      double v = 0.0;
      if (pcm16) {
        v = static_cast<std::int16_t>(getU16(d, off)) / 32768.0;
      } else if (pcm24) {
        std::int32_t u = static_cast<std::uint8_t>(d[off]) |
                         (static_cast<std::uint8_t>(d[off + 1]) << 8) |
                         (static_cast<std::uint8_t>(d[off + 2]) << 16);
        if (u & 0x800000) u |= static_cast<std::int32_t>(0xFF000000);
        v = u / 8388608.0;
      } else {
        float f;
        std::memcpy(&f, d.data() + off, 4);
        v = f;
      }
      audio.channels[c][i] = v;
    }
  }
  return audio;
}

double signalRms(const BinauralIR& s) {
  double acc = 0.0;
  for (double v : s.left) acc += v * v;
  for (double v : s.right) acc += v * v;
  const std::size_t n = s.left.size() + s.right.size();
  return n == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(n));
}

double signalPeak(const BinauralIR& s) {
  double peak = 0.0;
  for (double v : s.left) peak = std::max(peak, std::abs(v));
  for (double v : s.right) peak = std::max(peak, std::abs(v));
  return peak;
}

std::vector<double> rmsNormalize(std::vector<BinauralIR>& set) {
  if (set.empty()) fail("invalid-audio", "empty signal set");
  std::vector<double> gains(set.size(), 1.0);
  const double target = signalRms(set[0]);
  if (target <= 0.0) fail("silent-input", "reference signal is silent");
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double rms = signalRms(set[i]);
    if (rms <= 0.0) fail("silent-input", "signal " + std::to_string(i) + " is silent");
    const double g = target / rms;
    gains[i] = g;
    if (g != 1.0) {
      for (double& v : set[i].left) v *= g;
      for (double& v : set[i].right) v *= g;
    }
  }
  return gains;
}

}  // namespace sfr
