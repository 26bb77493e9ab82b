#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "sfr/audio.hpp"
#include "sfr/error.hpp"
#include "sfr/pipeline.hpp"

namespace {

namespace fsys = std::filesystem;

struct CommonOpts {
  std::string config;
  std::string out;
  std::string hrtf;
  std::uint64_t seed = 0;
  int syntheticOrder = 0;
};

void addCommon(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config, "Scene configuration file (JSON)")
      ->required();
  cmd->add_option("--out", o.out, "Output directory override");
  cmd->add_option("--seed", o.seed, "Seed override");
  cmd->add_option("--hrtf", o.hrtf, "Receiver set container override");
  cmd->add_option("--synthetic-hrtf", o.syntheticOrder,
                  "Synthesize a receiver set of this order");
}

sfr::SceneSpec loadScene(CLI::App* cmd, const CommonOpts& o) {
  sfr::SceneSpec scene = sfr::loadSceneSpec(o.config);
  if (cmd->count("--out") > 0) scene.outputDir = o.out;
  if (cmd->count("--seed") > 0) scene.seed = o.seed;
  if (cmd->count("--hrtf") > 0) scene.hrtf.path = o.hrtf;
  if (cmd->count("--synthetic-hrtf") > 0) {
    scene.hrtf.path.clear();
    scene.hrtf.syntheticOrder = o.syntheticOrder;
  }
  return scene;
}

int cmdSimulate(CLI::App* cmd, const CommonOpts& o) {
  const sfr::SceneSpec scene = loadScene(cmd, o);
  fsys::create_directories(scene.outputDir);
  for (const sfr::EnvironmentSpec& env : scene.environments) {
    const sfr::SplitSHImpulseResponse rir =
        sfr::simulateEnvironment(scene, env);
    const std::string direct =
        (fsys::path(scene.outputDir) / (env.name + "_direct.sfrir")).string();
    const std::string reverb =
        (fsys::path(scene.outputDir) / (env.name + "_reverb.sfrir")).string();
    sfr::saveSHRIR(rir, direct, reverb);
    const double drr = sfr::analyzeDRR(rir);
    const double t60 =
        sfr::analyzeT60(sfr::omniMagnitude(rir), scene.sampleRate);
    std::cout << env.name << ": order " << rir.order << ", " << rir.length
              << " samples, DRR " << drr << " dB, T60 " << t60 << " s\n"
              << "  wrote " << direct << "\n  wrote " << reverb << "\n";
  }
  return 0;
}

int cmdRender(CLI::App* cmd, const CommonOpts& o) {
  const sfr::SceneSpec scene = loadScene(cmd, o);
  const sfr::HRTFSH hrtf = sfr::prepareHRTF(scene);
  fsys::create_directories(scene.outputDir);
  for (const sfr::EnvironmentSpec& env : scene.environments) {
    const sfr::SplitSHImpulseResponse rir =
        sfr::simulateEnvironment(scene, env);
    for (const sfr::RenderCondition& cond : scene.conditions) {
      const sfr::BinauralIR brir = sfr::renderMixed(rir, hrtf, cond);
      const std::string path =
          (fsys::path(scene.outputDir) /
           (env.name + "_" + cond.name + "_brir.wav"))
              .string();
      sfr::writeWav(path, brir, 32);
      std::cout << "wrote " << path << "\n";
    }
  }
  return 0;
}

int cmdAnalyze(CLI::App* cmd, const CommonOpts& o) {
  const sfr::SceneSpec scene = loadScene(cmd, o);
  const std::string report = sfr::analyzeCmd(scene);
  std::cout << report;
  fsys::create_directories(scene.outputDir);
  const std::string path =
      (fsys::path(scene.outputDir) / "analysis.tsv").string();
  std::ofstream f(path);
  if (!f) sfr::fail("io-error", "cannot write " + path);
  f << report;
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmdOrientations(CLI::App* cmd, const CommonOpts& o,
                    const std::string& condition, double resolution) {
  const sfr::SceneSpec scene = loadScene(cmd, o);
  const std::vector<std::string> paths =
      sfr::orientationsCmd(scene, condition, resolution);
  std::cout << "wrote " << paths.size() << " orientation files to "
            << scene.outputDir << "\n";
  return 0;
}

int cmdRun(CLI::App* cmd, const CommonOpts& o) {
  const sfr::SceneSpec scene = loadScene(cmd, o);
  const sfr::StimulusManifest manifest = sfr::runPipeline(scene);
  for (const sfr::StimulusEntry& e : manifest.entries) {
    std::cout << e.file << ": DRR " << e.drrDb << " dB, T60 " << e.t60
              << " s, peak " << e.peak << ", rms " << e.rms << "\n";
  }
  std::cout << "wrote " << manifest.entries.size() << " stimuli and "
            << manifest.manifestPath << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical-harmonic room simulation and binaural rendering"};
  app.require_subcommand(1);

  CommonOpts simOpts, renOpts, anaOpts, oriOpts, runOpts;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Simulate split SH room impulse responses");
  addCommon(simulate, simOpts);
  CLI::App* render = app.add_subcommand(
      "render", "Render stereo impulse responses for every condition");
  addCommon(render, renOpts);
  CLI::App* analyze =
      app.add_subcommand("analyze", "Acoustic report for the scene");
  addCommon(analyze, anaOpts);
  CLI::App* orientations = app.add_subcommand(
      "orientations", "Stereo impulse response bank over head azimuth");
  addCommon(orientations, oriOpts);
  std::string condition;
  double resolution = 1.0;
  orientations->add_option("--condition", condition, "Condition name")
      ->required();
  orientations->add_option("--resolution", resolution,
                           "Azimuth step in degrees (must divide 360)");
  CLI::App* run =
      app.add_subcommand("run", "Full stimulus-generation pipeline");
  addCommon(run, runOpts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmdSimulate(simulate, simOpts);
    if (render->parsed()) return cmdRender(render, renOpts);
    if (analyze->parsed()) return cmdAnalyze(analyze, anaOpts);
    if (orientations->parsed()) {
      return cmdOrientations(orientations, oriOpts, condition, resolution);
    }
    if (run->parsed()) return cmdRun(run, runOpts);
  } catch (const sfr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
