#include <benchmark/benchmark.h>

#include "ctsev/cohort.hpp"
#include "ctsev/features.hpp"
#include "ctsev/forest.hpp"
#include "ctsev/metrics.hpp"
#include "ctsev/phantom.hpp"
#include "ctsev/protocol.hpp"
#include "ctsev/random.hpp"

namespace {

using namespace ctsev;

Phantom make_phantom(int side) {
  PhantomSpec spec;
  spec.dims = {side, side, side};
  spec.infection_fractions.fill(0.2);
  spec.seed = 1;
  return generate_phantom(spec);
}

void BM_ExtractFeatures(benchmark::State& state) {
  const Phantom ph = make_phantom(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(ph.ct, ph.labels, ph.infection));
  state.SetItemsProcessed(state.iterations() * ph.ct.dims().voxel_count());
}
BENCHMARK(BM_ExtractFeatures)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GeneratePhantom(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(make_phantom(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GeneratePhantom)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

Dataset bench_cohort() {
  return synth_cohort(CohortSpec::with_signal(std::vector<FeatureId>{5, 21, 59}, 1.5), 121, 55, 3);
}

void BM_FitForest(benchmark::State& state) {
  const Dataset d = bench_cohort();
  ForestParams p;
  p.trees = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(d, p, 7, static_cast<int>(state.range(1))));
}
BENCHMARK(BM_FitForest)->Args({100, 1})->Args({500, 1})->Args({500, 4})->Unit(benchmark::kMillisecond);

void BM_PredictScores(benchmark::State& state) {
  const Dataset d = bench_cohort();
  ForestParams p;
  p.trees = 500;
  const Forest forest = fit_forest(d, p, 7);
  for (auto _ : state) benchmark::DoNotOptimize(predict_scores(forest, d));
}
BENCHMARK(BM_PredictScores)->Unit(benchmark::kMillisecond);

void BM_RocCurve(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Label> truth(n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = rng.uniform() < 0.3 ? Label::Severe : Label::NonSevere;
    scores[i] = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_curve(truth, scores));
}
BENCHMARK(BM_RocCurve)->Arg(176)->Arg(10000);

void BM_Protocol(benchmark::State& state) {
  const Dataset d = bench_cohort();
  ProtocolConfig c;
  c.forest.trees = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(d, c));
}
BENCHMARK(BM_Protocol)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
