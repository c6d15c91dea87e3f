#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "cvboost/dataset.hpp"
#include "cvboost/rng.hpp"
#include "cvboost/tree.hpp"

using namespace cvboost;

namespace {

std::vector<double> random_targets(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = rng.uniform01();
  return y;
}

void BM_NumericSplit(benchmark::State& state) {
  const std::size_t n = state.range(0);
  Rng rng(1);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  const auto y = random_targets(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_numeric_split(x, y, 1));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_NumericSplit)->Arg(1000)->Arg(6000)->Arg(50000);

void BM_CategoricalSplit(benchmark::State& state) {
  const std::size_t n = 6000;
  const auto k = static_cast<std::int32_t>(state.range(0));
  Rng rng(3);
  std::vector<std::int32_t> codes(n);
  for (auto& c : codes) c = static_cast<std::int32_t>(rng.below(k));
  const auto y = random_targets(n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_categorical_split(codes, y, k, 1));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CategoricalSplit)->Arg(10)->Arg(100)->Arg(1000);

Dataset strobl_like(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.target_name = "y";
  FeatureColumn x0;
  x0.name = "x0";
  x0.kind = ColumnKind::Numeric;
  for (std::size_t i = 0; i < n; ++i) x0.numeric.push_back(rng.normal());
  data.features.push_back(std::move(x0));
  for (std::int32_t k : {10, 100}) {
    FeatureColumn col;
    col.name = "c" + std::to_string(k);
    col.kind = ColumnKind::Categorical;
    for (std::int32_t c = 0; c < k; ++c) col.dictionary.push_back(std::to_string(c));
    for (std::size_t i = 0; i < n; ++i)
      col.codes.push_back(static_cast<std::int32_t>(rng.below(k)));
    data.features.push_back(std::move(col));
  }
  for (std::size_t i = 0; i < n; ++i)
    data.target.push_back(rng.bernoulli(0.5) ? 0.5 : -0.5);
  return data;
}

void BM_CvRankFeature(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto data = strobl_like(n, 5);
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  const auto folds = assign_folds(n, 5, 7, 1, 0);
  for (auto _ : state) {
    for (int j = 0; j < 3; ++j) {
      benchmark::DoNotOptimize(
          cv_rank_feature(data, data.target, rows, j, folds, 1));
    }
  }
  state.SetItemsProcessed(state.iterations() * n * 3);
}
BENCHMARK(BM_CvRankFeature)->Arg(1000)->Arg(6000);

void BM_GrowTree(benchmark::State& state) {
  const std::size_t n = 6000;
  const auto data = strobl_like(n, 8);
  GrowthParams params;
  params.max_depth = 3;
  params.selector = state.range(0) ? SplitSelector::CrossValidated
                                   : SplitSelector::TrainGain;
  params.min_samples_split = params.selector == SplitSelector::CrossValidated
                                 ? 10
                                 : 2;
  params.seed = 11;
  params.tree_idx = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grow_tree(data, data.target, params));
  }
}
BENCHMARK(BM_GrowTree)->Arg(0)->Arg(1)->ArgNames({"cv"});

}  // namespace
