#include "sfr/pipeline.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "sfr/audio.hpp"
#include "sfr/eq.hpp"
#include "sfr/error.hpp"
#include "sfr/fft.hpp"

namespace sfr {

namespace {

namespace fsys = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

// Re-throws module errors with the pipeline stage and scene coordinates
// prepended, keeping the original category.
template <typename F>
auto stage(const std::string& name, const std::string& coords, F&& fn)
    -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(e.category(), "stage " + name +
                           (coords.empty() ? "" : " (" + coords + ")") + ": " +
                           e.what());
  }
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::size_t referenceIndex(const SceneSpec& scene) {
  if (!scene.referenceCondition.empty()) {
    for (std::size_t i = 0; i < scene.conditions.size(); ++i) {
      if (scene.conditions[i].name == scene.referenceCondition) return i;
    }
    fail("invalid-argument", "reference condition '" +
                                 scene.referenceCondition +
                                 "' is not in the condition list");
  }
  std::size_t best = 0;
  int bestSum = INT_MIN;
  for (std::size_t i = 0; i < scene.conditions.size(); ++i) {
    const int sum =
        scene.conditions[i].directOrder + scene.conditions[i].reverbOrder;
    if (sum > bestSum) {
      bestSum = sum;
      best = i;
    }
  }
  return best;
}

void validateScene(const SceneSpec& scene, int hrtfOrder) {
  if (scene.environments.empty() || scene.conditions.empty() ||
      scene.signals.empty()) {
    fail("invalid-argument",
         "scene needs at least one environment, condition, and signal");
  }
  const int maxOrder = std::min(scene.simulationOrder, hrtfOrder);
  for (const RenderCondition& c : scene.conditions) {
    if (c.name.empty()) fail("invalid-argument", "conditions need names");
    if (c.directOrder < 0 || c.reverbOrder < 0 || c.directOrder > maxOrder ||
        c.reverbOrder > maxOrder) {
      fail("invalid-argument",
           "condition '" + c.name + "' orders (" +
               std::to_string(c.directOrder) + ", " +
               std::to_string(c.reverbOrder) +
               ") exceed the available order " + std::to_string(maxOrder));
    }
  }
  for (const SignalSpec& s : scene.signals) {
    if (s.name.empty()) fail("invalid-argument", "signals need names");
  }
  for (const EnvironmentSpec& e : scene.environments) {
    if (e.name.empty()) fail("invalid-argument", "environments need names");
  }
}

std::array<double, 3> tripleFrom(const json& node, const std::string& where) {
  const auto v = node.get<std::vector<double>>();
  if (v.size() != 3) fail("parse-error", where + " needs three components");
  return {v[0], v[1], v[2]};
}

}  // namespace

SceneSpec loadSceneSpec(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("io-error", "cannot open scene config: " + path);
  json j;
  try {
    j = json::parse(f, nullptr, true, true);  // allow comments
  } catch (const json::exception& e) {
    fail("parse-error", path + ": " + e.what());
  }

  SceneSpec s;
  try {
    s.sampleRate = j.value("sampleRate", 48000.0);
    s.seed = j.value("seed", std::uint64_t{1});
    s.simulationOrder = j.value("simulationOrder", 30);
    s.outputDir = j.value("output", std::string("out"));
    s.referenceCondition = j.value("reference", std::string());
    if (j.contains("hrtf")) {
      const json& h = j.at("hrtf");
      s.hrtf.path = h.value("path", std::string());
      if (!s.hrtf.path.empty() && fsys::path(s.hrtf.path).is_relative()) {
        s.hrtf.path = (fsys::path(path).parent_path() / s.hrtf.path).string();
      }
      s.hrtf.syntheticOrder = h.value("synthetic", 30);
    }
    for (const json& e : j.at("environments")) {
      EnvironmentSpec env;
      env.name = e.value("name", std::string());
      env.id = e.value("id", 0);
      if (e.contains("facingDeg")) {
        env.hasFacingOverride = true;
        env.facingDeg = e.at("facingDeg").get<double>();
      }
      if (e.contains("dimensions")) {
        env.explicitGeometry = true;
        env.room.dimensions = tripleFrom(e.at("dimensions"), "dimensions");
        env.room.reflectionCoefficient = e.at("reflection").get<double>();
        env.room.targetT60 = e.at("targetT60").get<double>();
        env.geometry.listenerPosition =
            tripleFrom(e.at("listener"), "listener");
        env.geometry.sourcePosition = tripleFrom(e.at("source"), "source");
        env.geometry.listenerFacing = env.facingDeg * kPi / 180.0;
      }
      if (env.name.empty()) {
        env.name = "env" + std::to_string(env.id > 0
                                              ? env.id
                                              : static_cast<int>(
                                                    s.environments.size()) + 1);
      }
      s.environments.push_back(std::move(env));
    }
    for (const json& c : j.at("conditions")) {
      RenderCondition cond;
      cond.name = c.at("name").get<std::string>();
      cond.directOrder = c.at("direct").get<int>();
      cond.reverbOrder = c.at("reverb").get<int>();
      if (c.value("reference", false)) s.referenceCondition = cond.name;
      s.conditions.push_back(std::move(cond));
    }
    for (const json& g : j.at("signals")) {
      SignalSpec sig;
      sig.name = g.at("name").get<std::string>();
      sig.type = g.value("type", std::string("pink"));
      sig.path = g.value("path", std::string());
      if (!sig.path.empty() && fsys::path(sig.path).is_relative()) {
        sig.path = (fsys::path(path).parent_path() / sig.path).string();
      }
      sig.burstSeconds = g.value("burstSeconds", sig.burstSeconds);
      sig.fadeSeconds = g.value("fadeSeconds", sig.fadeSeconds);
      sig.pauseSeconds = g.value("pauseSeconds", sig.pauseSeconds);
      sig.repetitions = g.value("repetitions", sig.repetitions);
      s.signals.push_back(std::move(sig));
    }
  } catch (const json::exception& e) {
    fail("parse-error", path + ": " + e.what());
  }
  return s;
}

std::pair<RoomSpec, Geometry> resolveEnvironment(const EnvironmentSpec& env) {
  if (env.explicitGeometry) return {env.room, env.geometry};
  if (env.id <= 0) {
    fail("invalid-argument", "environment '" + env.name +
                                 "' needs a stock id or explicit geometry");
  }
  if (env.hasFacingOverride) {
    return buildEnvironment(env.id, env.facingDeg * kPi / 180.0);
  }
  return buildEnvironment(env.id);
}

SplitSHImpulseResponse simulateEnvironment(const SceneSpec& scene,
                                           const EnvironmentSpec& env) {
  const auto [room, geom] = resolveEnvironment(env);
  if (room.targetT60 <= 0.0) {
    fail("invalid-argument",
         "environment '" + env.name +
             "': a positive targetT60 is required to size the response");
  }
  const double span = 1.5 * room.targetT60;
  const double maxTime = span - kFractionalDelayTaps / scene.sampleRate;
  const std::vector<ImageSource> images = enumerateImages(room, geom, maxTime);
  return encodeSHRIR(images, scene.simulationOrder, scene.sampleRate, span);
}

HRTFSH prepareHRTF(const SceneSpec& scene) {
  HRTFSet set;
  if (!scene.hrtf.path.empty()) {
    set = loadHRTFSet(scene.hrtf.path);
  } else {
    const int order = scene.hrtf.syntheticOrder;
    set = syntheticHRTF(order, makeGrid(order), scene.seed).set;
    set.sampleRate = scene.sampleRate;  // synthetic IRs are rate-agnostic
  }
  if (set.sampleRate != scene.sampleRate) {
    fail("rate-mismatch",
         "receiver set rate " + std::to_string(set.sampleRate) +
             " differs from scene rate " + std::to_string(scene.sampleRate) +
             " (resampling unsupported)");
  }
  const auto nd = static_cast<double>(set.directions.size());
  const int maxEncodable = static_cast<int>(std::floor(std::sqrt(nd))) - 1;
  if (maxEncodable < 0) {
    fail("insufficient-directions", "receiver set has no directions");
  }
  const int order = std::min(scene.simulationOrder, maxEncodable);
  return encodeHRTFSH(set, order, kDefaultHRTFRegularization);
}

SourceSignal makeSignal(const SceneSpec& scene, std::size_t index) {
  if (index >= scene.signals.size()) {
    fail("invalid-argument", "signal index out of range");
  }
  const SignalSpec& spec = scene.signals[index];
  if (spec.type == "pink") {
    SourceSignal s = pinkBurst(spec.burstSeconds, spec.fadeSeconds,
                               spec.pauseSeconds, spec.repetitions,
                               scene.seed + index, scene.sampleRate);
    s.label = spec.name;
    return s;
  }
  if (spec.type == "file") {
    const AudioData a = readWav(spec.path);
    if (a.sampleRate != scene.sampleRate) {
      fail("rate-mismatch", spec.path + ": file rate " +
                                std::to_string(a.sampleRate) +
                                " differs from scene rate (resampling "
                                "unsupported)");
    }
    SourceSignal s;
    s.sampleRate = a.sampleRate;
    s.label = spec.name;
    const std::size_t n = a.channels.front().size();
    s.samples.assign(n, 0.0);
    for (const std::vector<double>& ch : a.channels) {
      for (std::size_t t = 0; t < n; ++t) s.samples[t] += ch[t];
    }
    const double inv = 1.0 / static_cast<double>(a.channels.size());
    for (double& v : s.samples) v *= inv;
    return s;
  }
  fail("invalid-argument",
       "signal '" + spec.name + "': unknown type '" + spec.type + "'");
}

std::vector<double> omniMagnitude(const SplitSHImpulseResponse& rir) {
  std::vector<double> v(rir.length);
  const cplx* d = rir.directChannel(0);
  const cplx* r = rir.reverbChannel(0);
  for (std::size_t t = 0; t < rir.length; ++t) v[t] = std::abs(d[t] + r[t]);
  return v;
}

namespace {

struct EnvironmentRender {
  double drr = 0.0;
  double t60 = 0.0;
  std::vector<BinauralIR> brirs;  // post-EQ, condition order
};

// Simulate, render every condition, measure, and equalize the
// non-reference conditions against the reference. The split RIR is
// released before returning; pass keepRir to receive it instead.
EnvironmentRender renderEnvironment(const SceneSpec& scene,
                                    const EnvironmentSpec& env,
                                    const HRTFSH& hrtf, std::size_t refIdx,
                                    SplitSHImpulseResponse* keepRir = nullptr) {
  EnvironmentRender out;
  {
    SplitSHImpulseResponse rir = stage(
        "simulate", env.name, [&] { return simulateEnvironment(scene, env); });
    out.drr = analyzeDRR(rir);
    out.t60 = analyzeT60(omniMagnitude(rir), scene.sampleRate);
    out.brirs.reserve(scene.conditions.size());
    for (const RenderCondition& cond : scene.conditions) {
      out.brirs.push_back(stage("render", env.name + "/" + cond.name, [&] {
        return renderMixed(rir, hrtf, cond);
      }));
    }
    if (keepRir != nullptr) *keepRir = std::move(rir);
  }
  for (std::size_t c = 0; c < scene.conditions.size(); ++c) {
    if (c == refIdx) continue;
    const std::string coords = env.name + "/" + scene.conditions[c].name;
    out.brirs[c] = stage("equalize", coords, [&] {
      // Broadband level first (low-order renders carry much less diffuse
      // energy), so the clipped gain curve only has to fix spectral shape.
      const double rendRms = signalRms(out.brirs[c]);
      if (rendRms <= 0.0) {
        fail("zero-energy", "cannot equalise a response with no energy");
      }
      const double align = signalRms(out.brirs[refIdx]) / rendRms;
      for (double& v : out.brirs[c].left) v *= align;
      for (double& v : out.brirs[c].right) v *= align;
      const EQFilter f = designEQ(out.brirs[c], out.brirs[refIdx]);
      return applyEQ(out.brirs[c], f);
    });
  }
  return out;
}

}  // namespace

StimulusManifest runPipeline(const SceneSpec& scene) {
  const HRTFSH hrtf = stage("hrtf", "", [&] { return prepareHRTF(scene); });
  validateScene(scene, hrtf.order);
  const std::size_t refIdx = referenceIndex(scene);

  std::vector<SourceSignal> signals;
  signals.reserve(scene.signals.size());
  for (std::size_t i = 0; i < scene.signals.size(); ++i) {
    signals.push_back(stage("signal", scene.signals[i].name,
                            [&] { return makeSignal(scene, i); }));
  }

  const std::size_t nEnv = scene.environments.size();
  const std::size_t nSig = scene.signals.size();
  const std::size_t nCond = scene.conditions.size();

  std::vector<double> envDrr(nEnv);
  std::vector<double> envT60(nEnv);
  // stimuli[e][s][c]
  std::vector<std::vector<std::vector<BinauralIR>>> stimuli(
      nEnv, std::vector<std::vector<BinauralIR>>(
                nSig, std::vector<BinauralIR>(nCond)));

  for (std::size_t e = 0; e < nEnv; ++e) {
    const EnvironmentSpec& env = scene.environments[e];
    EnvironmentRender rendered =
        renderEnvironment(scene, env, hrtf, refIdx, nullptr);
    envDrr[e] = rendered.drr;
    envT60[e] = rendered.t60;
    for (std::size_t s = 0; s < nSig; ++s) {
      for (std::size_t c = 0; c < nCond; ++c) {
        const std::string coords =
            env.name + "/" + scene.signals[s].name + "/" +
            scene.conditions[c].name;
        stimuli[e][s][c] = stage("convolve", coords, [&] {
          return convolve(signals[s], rendered.brirs[c]);
        });
      }
    }
  }

  // Level management: every stimulus in an (environment, signal) set takes
  // the RMS of the set's reference condition, then one shared gain places
  // the loudest sample of the whole run at -3 dBFS.
  for (std::size_t e = 0; e < nEnv; ++e) {
    for (std::size_t s = 0; s < nSig; ++s) {
      std::vector<BinauralIR> set;
      set.reserve(nCond);
      set.push_back(std::move(stimuli[e][s][refIdx]));
      for (std::size_t c = 0; c < nCond; ++c) {
        if (c != refIdx) set.push_back(std::move(stimuli[e][s][c]));
      }
      stage("normalize",
            scene.environments[e].name + "/" + scene.signals[s].name, [&] {
              rmsNormalize(set);
              return 0;
            });
      std::size_t k = 1;
      stimuli[e][s][refIdx] = std::move(set[0]);
      for (std::size_t c = 0; c < nCond; ++c) {
        if (c != refIdx) stimuli[e][s][c] = std::move(set[k++]);
      }
    }
  }
  double maxPeak = 0.0;
  for (const auto& perEnv : stimuli) {
    for (const auto& perSig : perEnv) {
      for (const BinauralIR& stim : perSig) {
        maxPeak = std::max(maxPeak, signalPeak(stim));
      }
    }
  }
  if (maxPeak <= 0.0) fail("zero-energy", "all stimuli are silent");
  const double headroomGain = std::pow(10.0, -3.0 / 20.0) / maxPeak;
  for (auto& perEnv : stimuli) {
    for (auto& perSig : perEnv) {
      for (BinauralIR& stim : perSig) {
        for (double& v : stim.left) v *= headroomGain;
        for (double& v : stim.right) v *= headroomGain;
      }
    }
  }

  fsys::create_directories(scene.outputDir);
  StimulusManifest manifest;
  std::ostringstream text;
  text << "file\tenvironment\tsignal\tcondition\tdirect_order\treverb_order"
          "\tdrr_db\tt60_s\tpeak\trms\n";
  for (std::size_t e = 0; e < nEnv; ++e) {
    for (std::size_t s = 0; s < nSig; ++s) {
      for (std::size_t c = 0; c < nCond; ++c) {
        const BinauralIR& stim = stimuli[e][s][c];
        StimulusEntry entry;
        entry.file = scene.environments[e].name + "_" +
                     scene.signals[s].name + "_" + scene.conditions[c].name +
                     ".wav";
        entry.environment = scene.environments[e].name;
        entry.signal = scene.signals[s].name;
        entry.condition = scene.conditions[c].name;
        entry.directOrder = scene.conditions[c].directOrder;
        entry.reverbOrder = scene.conditions[c].reverbOrder;
        entry.drrDb = envDrr[e];
        entry.t60 = envT60[e];
        entry.peak = signalPeak(stim);
        entry.rms = signalRms(stim);
        const std::string path =
            (fsys::path(scene.outputDir) / entry.file).string();
        stage("write", entry.file, [&] {
          writeWav(path, stim, 32);
          return 0;
        });
        text << entry.file << '\t' << entry.environment << '\t'
             << entry.signal << '\t' << entry.condition << '\t'
             << entry.directOrder << '\t' << entry.reverbOrder << '\t'
             << fmt("%.6f", entry.drrDb) << '\t' << fmt("%.6f", entry.t60)
             << '\t' << fmt("%.9g", entry.peak) << '\t'
             << fmt("%.9g", entry.rms) << '\n';
        manifest.entries.push_back(std::move(entry));
      }
    }
  }
  manifest.manifestPath =
      (fsys::path(scene.outputDir) / "manifest.tsv").string();
  std::ofstream mf(manifest.manifestPath);
  if (!mf) fail("io-error", "cannot write " + manifest.manifestPath);
  mf << text.str();
  if (!mf.flush()) fail("io-error", "write failed: " + manifest.manifestPath);
  return manifest;
}

std::string analyzeCmd(const SceneSpec& scene) {
  const HRTFSH hrtf = stage("hrtf", "", [&] { return prepareHRTF(scene); });
  validateScene(scene, hrtf.order);
  const std::size_t refIdx = referenceIndex(scene);

  std::ostringstream metrics;
  std::ostringstream energies;
  std::ostringstream spectra;
  metrics << "# environment metrics\n"
          << "environment\tdrr_db\tt60_s\tcritical_distance_m\tsabine_t60_s\n";
  energies << "# per-order energy\n"
           << "environment\tcomponent\torder\tenergy\n";
  spectra << "# third-octave band levels per rendered condition\n"
          << "environment\tcondition\tband_hz\tlevel_db\n";

  for (const EnvironmentSpec& env : scene.environments) {
    SplitSHImpulseResponse rir;
    const EnvironmentRender rendered =
        renderEnvironment(scene, env, hrtf, refIdx, &rir);
    const RoomSpec room = resolveEnvironment(env).first;
    metrics << env.name << '\t' << fmt("%.6f", rendered.drr) << '\t'
            << fmt("%.6f", rendered.t60) << '\t'
            << fmt("%.6f", criticalDistance(room, room.targetT60)) << '\t'
            << fmt("%.6f", sabineT60(room)) << '\n';

    for (int component = 0; component < 2; ++component) {
      for (int n = 0; n <= rir.order; ++n) {
        double energy = 0.0;
        for (int m = -n; m <= n; ++m) {
          const auto k = static_cast<std::size_t>(flatIndex(n, m));
          const cplx* ch = component == 0 ? rir.directChannel(k)
                                          : rir.reverbChannel(k);
          for (std::size_t t = 0; t < rir.length; ++t) {
            energy += std::norm(ch[t]);
          }
        }
        energies << env.name << '\t'
                 << (component == 0 ? "direct" : "reverberant") << '\t' << n
                 << '\t' << fmt("%.9e", energy) << '\n';
      }
    }

    for (std::size_t c = 0; c < scene.conditions.size(); ++c) {
      for (const BandLevel& band : thirdOctaveLevels(rendered.brirs[c])) {
        spectra << env.name << '\t' << scene.conditions[c].name << '\t'
                << fmt("%.1f", band.centerHz) << '\t'
                << fmt("%.4f", band.levelDb) << '\n';
      }
    }
  }

  return metrics.str() + "\n" + energies.str() + "\n" + spectra.str();
}

std::vector<std::string> orientationsCmd(const SceneSpec& scene,
                                         const std::string& conditionName,
                                         double resolutionDeg) {
  const HRTFSH hrtf = stage("hrtf", "", [&] { return prepareHRTF(scene); });
  validateScene(scene, hrtf.order);
  const RenderCondition* cond = nullptr;
  for (const RenderCondition& c : scene.conditions) {
    if (c.name == conditionName) cond = &c;
  }
  if (cond == nullptr) {
    fail("unknown-condition",
         "condition '" + conditionName + "' is not in the scene");
  }
  if (resolutionDeg <= 0.0 ||
      std::abs(std::remainder(360.0, resolutionDeg)) > 1e-9) {
    fail("invalid-argument", "resolution must evenly divide 360 degrees");
  }
  const auto count = static_cast<std::size_t>(std::lround(360.0 / resolutionDeg));
  const EnvironmentSpec& env = scene.environments.front();
  const SplitSHImpulseResponse rir = stage(
      "simulate", env.name, [&] { return simulateEnvironment(scene, env); });

  fsys::create_directories(scene.outputDir);
  const bool wholeDegrees = std::abs(std::remainder(resolutionDeg, 1.0)) < 1e-9;
  std::vector<std::string> paths;
  paths.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double deg = static_cast<double>(k) * resolutionDeg;
    const double psi = deg * kPi / 180.0;
    const BinauralIR brir = stage(
        "render", env.name + "/" + conditionName + "/az" + fmt("%g", deg),
        [&] { return renderMixed(rotateAzimuth(rir, -psi), hrtf, *cond); });
    char label[32];
    if (wholeDegrees) {
      std::snprintf(label, sizeof(label), "%03d", static_cast<int>(std::lround(deg)));
    } else {
      std::snprintf(label, sizeof(label), "%.3f", deg);
    }
    const std::string file =
        env.name + "_" + conditionName + "_az" + label + ".wav";
    const std::string path = (fsys::path(scene.outputDir) / file).string();
    writeWav(path, brir, 32);
    paths.push_back(path);
  }
  return paths;
}

std::vector<BandLevel> thirdOctaveLevels(const BinauralIR& ir) {
  const std::size_t n = std::max(ir.left.size(), ir.right.size());
  if (n == 0) fail("empty-input", "band analysis needs a non-empty signal");
  const std::size_t nfft = nextPow2(std::max<std::size_t>(n, 2048));
  std::vector<double> padded(nfft, 0.0);
  std::copy(ir.left.begin(), ir.left.end(), padded.begin());
  const std::vector<cplx> specL = rfft(padded);
  std::fill(padded.begin(), padded.end(), 0.0);
  std::copy(ir.right.begin(), ir.right.end(), padded.begin());
  const std::vector<cplx> specR = rfft(padded);

  const std::size_t nBins = specL.size();
  const double df = ir.sampleRate / static_cast<double>(nfft);
  const double edge = std::pow(2.0, 1.0 / 6.0);
  std::vector<BandLevel> bands;
  for (int k = -16; k <= 12; ++k) {
    const double center = 1000.0 * std::pow(2.0, k / 3.0);
    auto bLo = static_cast<std::size_t>(std::ceil(center / edge / df));
    auto bHi = static_cast<std::size_t>(std::floor(center * edge / df));
    if (bLo < 1) bLo = 1;
    if (bHi > nBins - 1) bHi = nBins - 1;
    if (bLo > bHi) continue;
    double power = 0.0;
    for (std::size_t b = bLo; b <= bHi; ++b) {
      power += 0.5 * (std::norm(specL[b]) + std::norm(specR[b]));
    }
    power /= static_cast<double>(bHi - bLo + 1);
    bands.push_back({center, 10.0 * std::log10(std::max(power, 1e-30))});
  }
  return bands;
}

}  // namespace sfr
