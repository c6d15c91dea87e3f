#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvboost/boosting.hpp"
#include "cvboost/importance.hpp"
#include "cvboost/rng.hpp"

namespace cvboost {

// Five-feature synthetic layout: X0 standard normal, X1..X4 categorical
// uniform over the configured alphabet sizes. The target is Bernoulli(0.5)
// when alpha == 0 (null case) and depends on X1 through
// Ber(0.5 + alpha) for codes 0..4, Ber(0.5 - alpha) for codes 5..9
// otherwise (power case).
struct StroblConfig {
  std::size_t n = 6000;
  std::array<std::int32_t, 4> cardinalities{10, 20, 50, 100};
  double alpha = 0.0;  // in [0, 0.5]; 0 = null case
  std::size_t n_test = 2000;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
};

enum class MethodKind { Cvb, TrainGain };
enum class SimMeasure { Gain, SplitCount, Cover, PfiTrain, PfiTest };

struct ExperimentRow {
  MethodKind method = MethodKind::Cvb;
  std::string measure;  // gain, split_count, ..., plus *_raw diagnostics
  std::string feature;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t reps = 0;
};

struct MethodStats {
  MethodKind method = MethodKind::Cvb;
  double mean_trees_fitted = 0.0;
  double mean_test_error = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<MethodStats> stats;
};

std::vector<FeatureColumn> gen_strobl_features(
    std::size_t n, std::span<const std::int32_t> cardinalities, Rng& rng);
std::vector<double> gen_null_target(std::size_t n, Rng& rng);
// CardinalityMismatch if any code >= 10.
std::vector<double> gen_power_target(std::span<const std::int32_t> x1_codes,
                                     double alpha, Rng& rng);

// Train and test sets for repetition `rep`; depends only on
// (config.seed, rep) so repetition subsets can be re-run independently.
TrainTestSplit make_strobl_rep(const StroblConfig& config, std::size_t rep);

// Fills in the per-method growth settings (selector, fold count, minimum
// split size) on top of shared hyper-parameters.
BoostParams method_params(MethodKind method, const BoostParams& shared);

// Default experiment hyper-parameters: log-loss, 100 trees, learning rate
// 0.1, depth 3, T = 5.
BoostParams simulation_defaults(std::uint64_t seed);

// Per repetition: generate train/test, fit each method, compute each
// requested measure (PFI uses 20 permutations), scale, then aggregate
// mean/std per (method, measure, feature). Raw (unscaled) averages are
// emitted as additional "<measure>_raw" rows. Repetitions run in parallel
// over `jobs` threads; results are identical for any job count.
ExperimentReport run_bias_experiment(const StroblConfig& config,
                                     std::span<const MethodKind> methods,
                                     std::span<const SimMeasure> measures,
                                     int jobs = 1);

struct AblationRow {
  MethodKind method = MethodKind::Cvb;
  std::string feature_set;  // "full" or "reduced"
  std::uint32_t fold = 0;
  double error = 0.0;
};

// K-fold errors for the full feature set and for the set with
// `drop_features` removed, with identical fold assignments so per-fold
// pairs are comparable.
std::vector<AblationRow> run_ablation(const Dataset& data,
                                      const std::vector<std::string>& drop_features,
                                      std::size_t k_folds,
                                      std::span<const MethodKind> methods,
                                      Metric metric,
                                      const BoostParams& shared, int jobs = 1);

struct BenchResult {
  MethodKind method = MethodKind::Cvb;
  Metric metric = Metric::Rmse;
  std::vector<double> fold_errors;
  double mean = 0.0;
  double stddev = 0.0;
  double mean_trees_fitted = 0.0;
};

// K-fold error benchmark per method.
std::vector<BenchResult> run_error_benchmark(const Dataset& data,
                                             std::size_t k_folds,
                                             std::span<const MethodKind> methods,
                                             Metric metric,
                                             const BoostParams& shared,
                                             int jobs = 1);

const char* method_name(MethodKind method);
const char* sim_measure_name(SimMeasure measure);

}  // namespace cvboost
