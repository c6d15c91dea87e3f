#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvboost/dataset.hpp"
#include "cvboost/tree.hpp"

namespace cvboost {

enum class LossKind { SquaredError, LogLoss };
enum class Metric { Mse, Rmse, LogLoss };

struct BoostParams {
  std::size_t n_trees = 100;
  double learning_rate = 0.1;
  GrowthParams growth;  // max_depth defaults to 3
  LossKind loss = LossKind::SquaredError;
  std::uint64_t seed = 0;
};

struct FeatureMeta {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<std::string> dictionary;  // empty for numeric
};

// Constant initial model plus an ordered list of shrunken trees. Trees hold
// loss-adjusted leaf values; prediction is f0 + lr * sum of tree outputs.
struct Ensemble {
  double f0 = 0.0;
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  LossKind loss = LossKind::SquaredError;
  Task task = Task::Regression;
  std::vector<FeatureMeta> features;
  std::size_t n_trees_budget = 0;  // requested M; trees.size() <= budget

  std::size_t n_trees_fitted() const { return trees.size(); }
  std::vector<std::vector<std::string>> dictionaries() const;
};

// SquaredError -> mean(y); LogLoss -> log-odds of mean(y).
double init_constant(std::span<const double> targets, LossKind loss);

// SquaredError -> y - F; LogLoss -> y - sigmoid(F).
std::vector<double> negative_gradient(LossKind loss,
                                      std::span<const double> targets,
                                      std::span<const double> raw_scores);

// Per-leaf line-search value. SquaredError: mean residual. LogLoss: one-step
// Newton sum(y - p) / sum(p (1 - p)), clamped to [-4, 4], denominator
// floored at 1e-12.
double leaf_step(LossKind loss, std::span<const double> targets,
                 std::span<const double> raw_scores);

// Sequential GBM loop: gradients, tree fit (selector from params.growth,
// tree_idx = m), per-leaf steps, shrunken update. A stub tree is discarded
// and terminates the loop early.
Ensemble fit(const Dataset& data, const BoostParams& params);

std::vector<double> predict_raw(const Ensemble& model, const Dataset& data);
// Staged variant over the first n_trees trees only.
std::vector<double> predict_raw(const Ensemble& model, const Dataset& data,
                                std::size_t n_trees);
// sigmoid(raw), clamped to [1e-12, 1 - 1e-12]. LogLoss models only.
std::vector<double> predict_proba(const Ensemble& model, const Dataset& data);

// Mean per-row loss. Mse/Rmse pair with SquaredError, LogLoss with LogLoss.
double evaluate(const Ensemble& model, const Dataset& data, Metric metric);

// Metric compatible with the model's loss (Rmse for regression, LogLoss for
// classification).
Metric default_metric(const Ensemble& model);

// JSON model file, format_version 1. load(save(e)) predicts bit-identically.
void save_model(const Ensemble& model, const std::string& path);
Ensemble load_model(const std::string& path);
std::string model_to_json(const Ensemble& model);
Ensemble model_from_json(const std::string& text);

const char* loss_name(LossKind loss);
const char* metric_name(Metric metric);

}  // namespace cvboost
