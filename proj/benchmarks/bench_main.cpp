#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "fatigue/fatigue.hpp"

using namespace fatigue;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

ScenarioSpec drowsy(double duration) {
  ScenarioSpec s;
  s.duration = duration;
  s.segments.push_back({0.0, duration, Regime::drowsy, 7});
  return s;
}

}  // namespace

static void BM_ApproximateEntropy(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(approximate_entropy(x, {2, 0.2}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApproximateEntropy)->RangeMultiplier(2)->Range(60, 1200)->Complexity();

static void BM_ExtractWindow(benchmark::State& state) {
  const auto frames = generate_scenario(drowsy(60.0));
  const auto windows = make_windows(frames, 60.0, 60.0);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(windows.front()));
}
BENCHMARK(BM_ExtractWindow);

static void BM_InferTable1(benchmark::State& state) {
  auto tax = std::make_shared<const Taxonomy>(default_taxonomy());
  FactBase fb(tax);
  fb.insert(Membership{"sw", "SteeringWheelMeasurementFatigue"});
  fb.insert(Membership{"yaw", "YawAngleMeasurementFatigue"});
  for (const char* c : {"MeanSWA_Extreme", "AngularVelocity_High", "FrequencyCorrection_High", "SWA_Extreme",
                        "MeanYaw_Small", "VarYaw_Extreme", "AccelerationYawRate_High", "Yaw_Extreme"}) {
    fb.insert(Membership{std::string(c) + "@0", c});
  }
  const RulePack& pack = table1_pack();
  for (auto _ : state) benchmark::DoNotOptimize(infer(fb, pack));
}
BENCHMARK(BM_InferTable1);

static void BM_Pipeline(benchmark::State& state) {
  const auto frames = generate_scenario(drowsy(static_cast<double>(state.range(0))));
  const Pipeline p{PipelineConfig{}};
  for (auto _ : state) benchmark::DoNotOptimize(p.run(frames));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_Pipeline)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
