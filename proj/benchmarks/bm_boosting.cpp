#include <benchmark/benchmark.h>

#include "cvboost/boosting.hpp"
#include "cvboost/experiments.hpp"
#include "cvboost/importance.hpp"

using namespace cvboost;

namespace {

TrainTestSplit power_split(std::size_t n) {
  StroblConfig config;
  config.n = n;
  config.n_test = 2000;
  config.alpha = 0.2;
  config.seed = 21;
  return make_strobl_rep(config, 0);
}

void BM_Fit(benchmark::State& state) {
  const auto split = power_split(6000);
  const auto method = state.range(0) ? MethodKind::Cvb : MethodKind::TrainGain;
  auto params = method_params(method, simulation_defaults(33));
  params.n_trees = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(split.train, params));
  }
}
BENCHMARK(BM_Fit)->Arg(0)->Arg(1)->ArgNames({"cv"})->Unit(benchmark::kMillisecond);

void BM_PredictRaw(benchmark::State& state) {
  const auto split = power_split(6000);
  auto params = method_params(MethodKind::TrainGain, simulation_defaults(34));
  const auto model = fit(split.train, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_raw(model, split.test));
  }
  state.SetItemsProcessed(state.iterations() * split.test.n_rows());
}
BENCHMARK(BM_PredictRaw);

void BM_PermutationImportance(benchmark::State& state) {
  const auto split = power_split(6000);
  auto params = method_params(MethodKind::TrainGain, simulation_defaults(35));
  params.n_trees = 50;
  const auto model = fit(split.train, params);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(permutation_importance(
        model, split.test, 20, Metric::LogLoss, 9, EvalSet::Test, jobs));
  }
}
BENCHMARK(BM_PermutationImportance)
    ->Arg(1)
    ->Arg(4)
    ->ArgNames({"jobs"})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
