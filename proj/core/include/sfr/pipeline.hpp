#ifndef SFR_PIPELINE_HPP
#define SFR_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfr/hrtf.hpp"
#include "sfr/render.hpp"
#include "sfr/room.hpp"
#include "sfr/signal.hpp"

namespace sfr {

// One source signal in a scene: freshly synthesized pink-noise bursts, or
// a mono audio file already at the scene sample rate.
struct SignalSpec {
  std::string name;
  std::string type = "pink";  // "pink" | "file"
  std::string path;           // for type "file"
  double burstSeconds = 1.0;
  double fadeSeconds = 0.02;
  double pauseSeconds = 0.3;
  int repetitions = 3;
};

// Either a stock environment id (with optional facing override) or a fully
// explicit room + geometry.
struct EnvironmentSpec {
  std::string name;
  int id = 0;  // > 0 selects a stock environment
  bool hasFacingOverride = false;
  double facingDeg = 0.0;
  bool explicitGeometry = false;
  RoomSpec room;
  Geometry geometry;
};

struct HRTFSpec {
  std::string path;  // receiver container file; empty = synthetic
  int syntheticOrder = 30;
};

struct SceneSpec {
  double sampleRate = 48000.0;
  std::uint64_t seed = 1;
  int simulationOrder = 30;
  std::string outputDir = "out";
  HRTFSpec hrtf;
  std::vector<EnvironmentSpec> environments;
  std::vector<RenderCondition> conditions;
  std::string referenceCondition;  // empty: largest direct+reverb order sum
  std::vector<SignalSpec> signals;
};

// Parses the JSON scene document (schema in docs/formats.md).
SceneSpec loadSceneSpec(const std::string& path);

struct StimulusEntry {
  std::string file;  // relative to the output directory
  std::string environment;
  std::string signal;
  std::string condition;
  int directOrder = 0;
  int reverbOrder = 0;
  double drrDb = 0.0;
  double t60 = 0.0;
  double peak = 0.0;  // linear full scale
  double rms = 0.0;
};

struct StimulusManifest {
  std::vector<StimulusEntry> entries;
  std::string manifestPath;
};

// Room and geometry for an environment entry (stock id or explicit).
std::pair<RoomSpec, Geometry> resolveEnvironment(const EnvironmentSpec& env);

// Split SH RIR for one environment at the scene order and rate. The
// response spans 1.5 * targetT60 seconds; images are kept up to that span
// less the reconstruction pulse length.
SplitSHImpulseResponse simulateEnvironment(const SceneSpec& scene,
                                           const EnvironmentSpec& env);

// Loads the receiver set from scene.hrtf.path, or synthesizes one on a
// quadrature grid (seeded by scene.seed), then encodes it to SH.
HRTFSH prepareHRTF(const SceneSpec& scene);

// Realizes signal `index` of the scene. Pink signals draw from
// scene.seed + index; file signals are folded to mono.
SourceSignal makeSignal(const SceneSpec& scene, std::size_t index);

// Magnitude of the summed omnidirectional channel, used for decay analysis.
std::vector<double> omniMagnitude(const SplitSHImpulseResponse& rir);

// Full reproduction run: simulate each environment, render every
// condition, equalize non-reference conditions against the reference,
// convolve with every signal, normalize the set, and write stimuli plus a
// manifest to scene.outputDir.
StimulusManifest runPipeline(const SceneSpec& scene);

// Acoustic report: per-environment DRR / T60 / critical distance / Sabine
// estimate, per-order SH energy of each component, and third-octave band
// levels of every rendered condition. Tab-delimited text.
std::string analyzeCmd(const SceneSpec& scene);

// Head-orientation bank: renders the chosen condition for the scene's
// first environment at every multiple of resolutionDeg and writes one
// stereo float WAV per azimuth. Returns the written paths.
std::vector<std::string> orientationsCmd(const SceneSpec& scene,
                                         const std::string& conditionName,
                                         double resolutionDeg);

struct BandLevel {
  double centerHz = 0.0;
  double levelDb = 0.0;
};

// Third-octave band levels of a stereo IR: mean power across bins and
// ears per band, in dB. Bands centered at 1000 * 2^(k/3) Hz covering
// roughly 25 Hz to 16 kHz; bands without any FFT bin are omitted.
std::vector<BandLevel> thirdOctaveLevels(const BinauralIR& ir);

}  // namespace sfr

#endif  // SFR_PIPELINE_HPP
