#include "cvboost/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "cvboost/parallel.hpp"

namespace cvboost {

namespace {

constexpr std::size_t kPfiPermutations = 20;

std::vector<std::string> int_labels(std::int32_t k) {
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::int32_t i = 0; i < k; ++i) labels.push_back(std::to_string(i));
  return labels;
}

void validate(const StroblConfig& config) {
  if (config.alpha < 0.0 || config.alpha > 0.5)
    raise(Errc::InvalidConfig, "alpha must be in [0, 0.5]");
  for (auto k : config.cardinalities) {
    if (k < 2) raise(Errc::InvalidConfig, "cardinalities must be at least 2");
  }
  if (config.reps < 1) raise(Errc::InvalidConfig, "reps must be at least 1");
  if (config.n < 1) raise(Errc::InvalidConfig, "n must be at least 1");
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* method_name(MethodKind method) {
  return method == MethodKind::Cvb ? "cvb" : "train_gain";
}

const char* sim_measure_name(SimMeasure measure) {
  switch (measure) {
    case SimMeasure::Gain: return "gain";
    case SimMeasure::SplitCount: return "split_count";
    case SimMeasure::Cover: return "cover";
    case SimMeasure::PfiTrain: return "pfi_train";
    case SimMeasure::PfiTest: return "pfi_test";
  }
  return "?";
}

std::vector<FeatureColumn> gen_strobl_features(
    std::size_t n, std::span<const std::int32_t> cardinalities, Rng& rng) {
  std::vector<FeatureColumn> features;
  FeatureColumn x0;
  x0.name = "X0";
  x0.kind = ColumnKind::Numeric;
  x0.numeric.reserve(n);
  for (std::size_t i = 0; i < n; ++i) x0.numeric.push_back(rng.normal());
  features.push_back(std::move(x0));
  for (std::size_t f = 0; f < cardinalities.size(); ++f) {
    FeatureColumn col;
    col.name = "X" + std::to_string(f + 1);
    col.kind = ColumnKind::Categorical;
    col.dictionary = int_labels(cardinalities[f]);
    col.codes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      col.codes.push_back(static_cast<std::int32_t>(
          rng.below(static_cast<std::uint64_t>(cardinalities[f]))));
    }
    features.push_back(std::move(col));
  }
  return features;
}

std::vector<double> gen_null_target(std::size_t n, Rng& rng) {
  std::vector<double> y;
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) y.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
  return y;
}

std::vector<double> gen_power_target(std::span<const std::int32_t> x1_codes,
                                     double alpha, Rng& rng) {
  if (alpha < 0.0 || alpha > 0.5)
    raise(Errc::InvalidConfig, "alpha must be in [0, 0.5]");
  std::vector<double> y;
  y.reserve(x1_codes.size());
  for (auto code : x1_codes) {
    if (code < 0 || code >= 10)
      raise(Errc::CardinalityMismatch,
            "power-case targets need X1 codes in [0, 10); got " +
                std::to_string(code));
    const double p = code <= 4 ? 0.5 + alpha : 0.5 - alpha;
    y.push_back(rng.bernoulli(p) ? 1.0 : 0.0);
  }
  return y;
}

TrainTestSplit make_strobl_rep(const StroblConfig& config, std::size_t rep) {
  validate(config);
  Rng rng(mix_seed({config.seed,
                    static_cast<std::uint64_t>(SeedDomain::Repetition), rep}));
  auto build = [&](std::size_t n) {
    Dataset data;
    data.task = Task::BinaryClassification;
    data.target_name = "y";
    data.features = gen_strobl_features(n, config.cardinalities, rng);
    if (config.alpha == 0.0) {
      data.target = gen_null_target(n, rng);
    } else {
      data.target = gen_power_target(data.features[1].codes, config.alpha, rng);
    }
    return data;
  };
  TrainTestSplit split;
  split.train = build(config.n);
  split.test = build(config.n_test);
  return split;
}

BoostParams simulation_defaults(std::uint64_t seed) {
  BoostParams params;
  params.n_trees = 100;
  params.learning_rate = 0.1;
  params.loss = LossKind::LogLoss;
  params.seed = seed;
  params.growth.max_depth = 3;
  params.growth.min_samples_leaf = 1;
  params.growth.min_samples_split = 2;
  params.growth.cv_folds = 5;
  return params;
}

BoostParams method_params(MethodKind method, const BoostParams& shared) {
  BoostParams params = shared;
  if (method == MethodKind::Cvb) {
    params.growth.selector = SplitSelector::CrossValidated;
    params.growth.min_samples_split = std::max(
        shared.growth.min_samples_split, 2 * shared.growth.cv_folds);
  } else {
    params.growth.selector = SplitSelector::TrainGain;
    params.growth.min_samples_split =
        std::max<std::size_t>(shared.growth.min_samples_split, 2);
  }
  return params;
}

namespace {

struct RepOutcome {
  // per method, per measure: scaled and raw per-feature vectors
  std::vector<std::vector<std::vector<double>>> scaled;
  std::vector<std::vector<std::vector<double>>> raw;
  std::vector<double> trees_fitted;
  std::vector<double> test_error;
};

}  // namespace

ExperimentReport run_bias_experiment(const StroblConfig& config,
                                     std::span<const MethodKind> methods,
                                     std::span<const SimMeasure> measures,
                                     int jobs) {
  validate(config);
  const std::size_t n_features = 1 + config.cardinalities.size();
  std::vector<RepOutcome> outcomes(config.reps);

  parallel_for(config.reps, jobs, [&](std::size_t rep) {
    const auto split = make_strobl_rep(config, rep);
    auto& outcome = outcomes[rep];
    outcome.scaled.resize(methods.size());
    outcome.raw.resize(methods.size());
    outcome.trees_fitted.resize(methods.size());
    outcome.test_error.resize(methods.size());

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto fit_seed =
          mix_seed({config.seed,
                    static_cast<std::uint64_t>(SeedDomain::FitSeed), rep, mi});
      const auto params =
          method_params(methods[mi], simulation_defaults(fit_seed));
      const auto model = fit(split.train, params);
      outcome.trees_fitted[mi] = static_cast<double>(model.n_trees_fitted());
      outcome.test_error[mi] = evaluate(model, split.test, Metric::LogLoss);

      outcome.scaled[mi].resize(measures.size());
      outcome.raw[mi].resize(measures.size());
      for (std::size_t si = 0; si < measures.size(); ++si) {
        ImportanceReport report;
        switch (measures[si]) {
          case SimMeasure::Gain:
            report = gain_importance(model);
            break;
          case SimMeasure::SplitCount:
            report = split_count_importance(model);
            break;
          case SimMeasure::Cover:
            report = cover_importance(model);
            break;
          case SimMeasure::PfiTrain:
          case SimMeasure::PfiTest: {
            const bool on_train = measures[si] == SimMeasure::PfiTrain;
            const auto pfi_seed = mix_seed(
                {config.seed,
                 static_cast<std::uint64_t>(SeedDomain::Permutation), rep, mi,
                 on_train ? 0u : 1u});
            report = permutation_importance(
                model, on_train ? split.train : split.test, kPfiPermutations,
                Metric::LogLoss, pfi_seed,
                on_train ? EvalSet::Train : EvalSet::Test, 1);
            break;
          }
        }
        outcome.scaled[mi][si] = report.scaled;
        outcome.raw[mi][si] = report.raw;
      }
    }
  });

  ExperimentReport report;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    auto emit = [&](const std::string& measure, bool use_raw) {
      for (std::size_t si = 0; si < measures.size(); ++si) {
        if (measure != sim_measure_name(measures[si])) continue;
        for (std::size_t j = 0; j < n_features; ++j) {
          std::vector<double> values;
          values.reserve(config.reps);
          for (const auto& outcome : outcomes) {
            const auto& grid = use_raw ? outcome.raw : outcome.scaled;
            values.push_back(grid[mi][si][j]);
          }
          double s = 0.0;
          for (double v : values) s += v;
          const double mean = s / static_cast<double>(values.size());
          report.rows.push_back(
              {methods[mi], use_raw ? measure + "_raw" : measure,
               "X" + std::to_string(j), mean, sample_std(values, mean),
               config.reps});
        }
      }
    };
    for (std::size_t si = 0; si < measures.size(); ++si)
      emit(sim_measure_name(measures[si]), false);
    for (std::size_t si = 0; si < measures.size(); ++si)
      emit(sim_measure_name(measures[si]), true);

    MethodStats stats;
    stats.method = methods[mi];
    for (const auto& outcome : outcomes) {
      stats.mean_trees_fitted += outcome.trees_fitted[mi];
      stats.mean_test_error += outcome.test_error[mi];
    }
    stats.mean_trees_fitted /= static_cast<double>(config.reps);
    stats.mean_test_error /= static_cast<double>(config.reps);
    report.stats.push_back(stats);
  }
  return report;
}

std::vector<AblationRow> run_ablation(
    const Dataset& data, const std::vector<std::string>& drop_features_list,
    std::size_t k_folds, std::span<const MethodKind> methods, Metric metric,
    const BoostParams& shared, int jobs) {
  const Dataset reduced = drop_features(data, drop_features_list);
  const auto folds = kfold_assignment(data.n_rows(), k_folds, shared.seed);

  // cells: feature_set x method x fold, errors merged by index
  const std::size_t cells = 2 * methods.size() * k_folds;
  std::vector<double> errors(cells, 0.0);
  parallel_for(cells, jobs, [&](std::size_t cell) {
    const std::size_t set_idx = cell / (methods.size() * k_folds);
    const std::size_t rest = cell % (methods.size() * k_folds);
    const std::size_t mi = rest / k_folds;
    const auto fold = static_cast<std::uint32_t>(rest % k_folds);
    const Dataset& base = set_idx == 0 ? data : reduced;
    const auto split = make_fold(base, folds, fold);
    BoostParams params = method_params(methods[mi], shared);
    // same per-(fold, method) seed for both feature sets keeps folds paired
    params.seed = mix_seed({shared.seed,
                            static_cast<std::uint64_t>(SeedDomain::FitSeed),
                            fold, mi});
    const auto model = fit(split.train, params);
    errors[cell] = evaluate(model, split.test, metric);
  });

  std::vector<AblationRow> rows;
  rows.reserve(cells);
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t set_idx = 0; set_idx < 2; ++set_idx) {
      for (std::size_t fold = 0; fold < k_folds; ++fold) {
        const std::size_t cell =
            set_idx * methods.size() * k_folds + mi * k_folds + fold;
        rows.push_back({methods[mi], set_idx == 0 ? "full" : "reduced",
                        static_cast<std::uint32_t>(fold), errors[cell]});
      }
    }
  }
  return rows;
}

std::vector<BenchResult> run_error_benchmark(
    const Dataset& data, std::size_t k_folds,
    std::span<const MethodKind> methods, Metric metric,
    const BoostParams& shared, int jobs) {
  const auto folds = kfold_assignment(data.n_rows(), k_folds, shared.seed);
  const std::size_t cells = methods.size() * k_folds;
  std::vector<double> errors(cells, 0.0);
  std::vector<double> trees(cells, 0.0);
  parallel_for(cells, jobs, [&](std::size_t cell) {
    const std::size_t mi = cell / k_folds;
    const auto fold = static_cast<std::uint32_t>(cell % k_folds);
    const auto split = make_fold(data, folds, fold);
    BoostParams params = method_params(methods[mi], shared);
    params.seed = mix_seed({shared.seed,
                            static_cast<std::uint64_t>(SeedDomain::FitSeed),
                            fold, mi});
    const auto model = fit(split.train, params);
    errors[cell] = evaluate(model, split.test, metric);
    trees[cell] = static_cast<double>(model.n_trees_fitted());
  });

  std::vector<BenchResult> results;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    BenchResult res;
    res.method = methods[mi];
    res.metric = metric;
    res.fold_errors.assign(errors.begin() + mi * k_folds,
                           errors.begin() + (mi + 1) * k_folds);
    double s = 0.0, t = 0.0;
    for (std::size_t k = 0; k < k_folds; ++k) {
      s += res.fold_errors[k];
      t += trees[mi * k_folds + k];
    }
    res.mean = s / static_cast<double>(k_folds);
    res.stddev = sample_std(res.fold_errors, res.mean);
    res.mean_trees_fitted = t / static_cast<double>(k_folds);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace cvboost
