#include <benchmark/benchmark.h>

#include <vector>

#include "sfr/audio.hpp"
#include "sfr/eq.hpp"
#include "sfr/hrtf.hpp"
#include "sfr/render.hpp"
#include "sfr/rng.hpp"
#include "sfr/room.hpp"
#include "sfr/sh.hpp"

using namespace sfr;

static void BM_shBasisAll(benchmark::State& state) {
  const Direction d = makeDirection(1.1, 0.7);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shBasisAll(order, d));
  }
}
BENCHMARK(BM_shBasisAll)->Arg(3)->Arg(10)->Arg(30);

static void BM_makeGrid(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(makeGrid(order));
  }
}
BENCHMARK(BM_makeGrid)->Arg(10)->Arg(30);

static void BM_sft(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const QuadratureGrid grid = makeGrid(order);
  Rng rng(1);
  std::vector<cplx> values(grid.directions.size());
  for (cplx& v : values) v = cplx{rng.nextGaussian(), rng.nextGaussian()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sft(values, grid, order));
  }
}
BENCHMARK(BM_sft)->Arg(4)->Arg(10);

static void BM_enumerateImages(benchmark::State& state) {
  const auto [room, geom] = buildEnvironment(1);
  const double maxTime = static_cast<double>(state.range(0)) * 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerateImages(room, geom, maxTime));
  }
}
BENCHMARK(BM_enumerateImages)->Arg(80)->Arg(300);

static void BM_encodeSHRIR(benchmark::State& state) {
  const auto [room, geom] = buildEnvironment(1);
  const int order = static_cast<int>(state.range(0));
  const std::vector<ImageSource> images = enumerateImages(room, geom, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encodeSHRIR(images, order, 48000.0, 0.06));
  }
}
BENCHMARK(BM_encodeSHRIR)->Arg(1)->Arg(4);

static void BM_renderUniform(benchmark::State& state) {
  const auto [room, geom] = buildEnvironment(1);
  const int order = static_cast<int>(state.range(0));
  const SplitSHImpulseResponse rir =
      encodeSHRIR(enumerateImages(room, geom, 0.05), order, 48000.0, 0.06);
  const HRTFSH hrtf =
      syntheticHRTF(order, makeGrid(order), 3, 64).trueCoefficients;
  for (auto _ : state) {
    benchmark::DoNotOptimize(renderUniform(rir, hrtf, order));
  }
}
BENCHMARK(BM_renderUniform)->Arg(1)->Arg(4);

static void BM_designEQ(benchmark::State& state) {
  Rng rng(2);
  BinauralIR ref;
  ref.left.resize(16384);
  ref.right.resize(16384);
  for (double& v : ref.left) v = rng.nextGaussian();
  for (double& v : ref.right) v = rng.nextGaussian();
  BinauralIR half = ref;
  for (double& v : half.left) v *= 0.5;
  for (double& v : half.right) v *= 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(designEQ(half, ref));
  }
}
BENCHMARK(BM_designEQ);

static void BM_pinkBurst(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinkBurst(1.0, 0.02, 0.3, 3, 7, 48000.0));
  }
}
BENCHMARK(BM_pinkBurst);

BENCHMARK_MAIN();
