#include "cvboost/boosting.hpp"

#include <algorithm>
#include <cmath>

#include "cvboost/errors.hpp"

namespace cvboost {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kLeafClamp = 4.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_proba(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

void check_metric(LossKind loss, Metric metric) {
  const bool ok = (metric == Metric::LogLoss) == (loss == LossKind::LogLoss);
  if (!ok)
    raise(Errc::WrongMetric, std::string("metric ") + metric_name(metric) +
                                 " is incompatible with loss " +
                                 loss_name(loss));
}

}  // namespace

const char* loss_name(LossKind loss) {
  return loss == LossKind::SquaredError ? "squared_error" : "log_loss";
}

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::Mse: return "mse";
    case Metric::Rmse: return "rmse";
    case Metric::LogLoss: return "logloss";
  }
  return "?";
}

std::vector<std::vector<std::string>> Ensemble::dictionaries() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.dictionary);
  return out;
}

double init_constant(std::span<const double> targets, LossKind loss) {
  if (targets.empty()) raise(Errc::EmptyNode, "empty target vector");
  double s = 0.0;
  for (double y : targets) s += y;
  const double mean = s / static_cast<double>(targets.size());
  if (loss == LossKind::SquaredError) return mean;
  if (mean <= 0.0 || mean >= 1.0)
    raise(Errc::DegenerateTarget,
          "all targets are " + std::to_string(mean) +
              "; log-odds are unbounded");
  return std::log(mean / (1.0 - mean));
}

std::vector<double> negative_gradient(LossKind loss,
                                      std::span<const double> targets,
                                      std::span<const double> raw_scores) {
  if (targets.size() != raw_scores.size())
    raise(Errc::InvalidConfig, "targets and scores differ in length");
  std::vector<double> g(targets.size());
  if (loss == LossKind::SquaredError) {
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = targets[i] - raw_scores[i];
  } else {
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = targets[i] - sigmoid(raw_scores[i]);
  }
  return g;
}

double leaf_step(LossKind loss, std::span<const double> targets,
                 std::span<const double> raw_scores) {
  if (targets.empty()) raise(Errc::EmptyNode, "empty leaf");
  if (loss == LossKind::SquaredError) {
    double s = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i)
      s += targets[i] - raw_scores[i];
    return s / static_cast<double>(targets.size());
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double p = sigmoid(raw_scores[i]);
    num += targets[i] - p;
    den += p * (1.0 - p);
  }
  den = std::max(den, 1e-12);
  return std::clamp(num / den, -kLeafClamp, kLeafClamp);
}

Ensemble fit(const Dataset& data, const BoostParams& params) {
  if (params.n_trees < 1)
    raise(Errc::InvalidConfig, "n_trees must be at least 1");
  if (!(params.learning_rate > 0.0) || params.learning_rate > 1.0)
    raise(Errc::InvalidConfig, "learning_rate must be in (0, 1]");
  if (params.growth.selector == SplitSelector::CrossValidated &&
      params.growth.min_samples_split < 2 * params.growth.cv_folds) {
    raise(Errc::InvalidConfig,
          "cross-validated selection needs min_samples_split >= 2 * folds (" +
              std::to_string(2 * params.growth.cv_folds) + ")");
  }

  for (const auto& col : data.features) {
    if (col.kind != ColumnKind::Categorical) continue;
    for (auto code : col.codes) {
      if (code < 0 || code >= col.cardinality()) {
        raise(Errc::CardinalityMismatch,
              "training column '" + col.name + "' holds code " +
                  std::to_string(code) + " outside its dictionary (size " +
                  std::to_string(col.cardinality()) +
                  "); sentinel-coded rows cannot be fit");
      }
    }
  }

  Ensemble model;
  model.learning_rate = params.learning_rate;
  model.loss = params.loss;
  model.task = data.task;
  model.n_trees_budget = params.n_trees;
  model.features.reserve(data.n_features());
  for (const auto& col : data.features)
    model.features.push_back({col.name, col.kind, col.dictionary});

  model.f0 = init_constant(data.target, params.loss);
  const std::size_t n = data.n_rows();
  std::vector<double> scores(n, model.f0);
  std::vector<std::size_t> leaf_of(n);
  std::vector<double> leaf_targets, leaf_scores;

  for (std::size_t m = 1; m <= params.n_trees; ++m) {
    const auto gradients =
        negative_gradient(params.loss, data.target, scores);
    GrowthParams growth = params.growth;
    growth.seed = params.seed;
    growth.tree_idx = m;
    Tree tree = grow_tree(data, gradients, growth);
    if (tree.is_stub()) break;  // residual means are zero from here on

    // Replace each leaf's raw gradient mean with the loss-specific step.
    for (std::size_t i = 0; i < n; ++i) leaf_of[i] = route_to_leaf(tree, data, i);
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      if (!tree.nodes[k].is_leaf) continue;
      leaf_targets.clear();
      leaf_scores.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (leaf_of[i] == k) {
          leaf_targets.push_back(data.target[i]);
          leaf_scores.push_back(scores[i]);
        }
      }
      tree.nodes[k].value = leaf_step(params.loss, leaf_targets, leaf_scores);
    }
    for (std::size_t i = 0; i < n; ++i)
      scores[i] += params.learning_rate * tree.nodes[leaf_of[i]].value;
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::vector<double> predict_raw(const Ensemble& model, const Dataset& data,
                                std::size_t n_trees) {
  if (data.n_features() != model.features.size())
    raise(Errc::FeatureCountMismatch,
          "data has " + std::to_string(data.n_features()) +
              " features, model expects " +
              std::to_string(model.features.size()));
  n_trees = std::min(n_trees, model.trees.size());
  std::vector<double> out(data.n_rows(), model.f0);
  for (std::size_t m = 0; m < n_trees; ++m) {
    const auto& tree = model.trees[m];
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += model.learning_rate * predict_tree(tree, data, i);
  }
  return out;
}

std::vector<double> predict_raw(const Ensemble& model, const Dataset& data) {
  return predict_raw(model, data, model.trees.size());
}

std::vector<double> predict_proba(const Ensemble& model, const Dataset& data) {
  if (model.loss != LossKind::LogLoss)
    raise(Errc::WrongLoss, "predict_proba requires a log-loss model");
  auto out = predict_raw(model, data);
  for (auto& v : out) v = clamp_proba(sigmoid(v));
  return out;
}

double evaluate(const Ensemble& model, const Dataset& data, Metric metric) {
  check_metric(model.loss, metric);
  if (data.n_rows() == 0) raise(Errc::EmptyNode, "empty evaluation set");
  if (metric == Metric::LogLoss) {
    const auto probas = predict_proba(model, data);
    double s = 0.0;
    for (std::size_t i = 0; i < probas.size(); ++i) {
      const double y = data.target[i];
      s += -(y * std::log(probas[i]) + (1.0 - y) * std::log(1.0 - probas[i]));
    }
    return s / static_cast<double>(probas.size());
  }
  const auto raw = predict_raw(model, data);
  double s = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double d = data.target[i] - raw[i];
    s += d * d;
  }
  const double mse = s / static_cast<double>(raw.size());
  return metric == Metric::Mse ? mse : std::sqrt(mse);
}

Metric default_metric(const Ensemble& model) {
  return model.loss == LossKind::LogLoss ? Metric::LogLoss : Metric::Mse;
}

}  // namespace cvboost
