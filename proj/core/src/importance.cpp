#include "cvboost/importance.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "cvboost/csv.hpp"
#include "cvboost/parallel.hpp"
#include "cvboost/rng.hpp"

namespace cvboost {

namespace {

ImportanceReport make_report(MeasureKind measure, std::vector<double> raw) {
  ImportanceReport report;
  report.measure = measure;
  report.scaled = scale_importance(raw);
  report.raw = std::move(raw);
  return report;
}

double evaluate_with_override(const Ensemble& model, const Dataset& data,
                              Metric metric, const ColumnOverride& ov) {
  const std::size_t n = data.n_rows();
  std::vector<double> raw(n, model.f0);
  for (const auto& tree : model.trees) {
    for (std::size_t i = 0; i < n; ++i)
      raw[i] += model.learning_rate * predict_tree(tree, data, i, ov);
  }
  double s = 0.0;
  if (metric == Metric::LogLoss) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = 1.0 / (1.0 + std::exp(-raw[i]));
      p = std::min(1.0 - 1e-12, std::max(1e-12, p));
      const double y = data.target[i];
      s += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return s / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = data.target[i] - raw[i];
    s += d * d;
  }
  const double mse = s / static_cast<double>(n);
  return metric == Metric::Mse ? mse : std::sqrt(mse);
}

}  // namespace

std::vector<double> scale_importance(std::span<const double> raw) {
  double total = 0.0;
  for (double v : raw) {
    if (v < 0.0)
      raise(Errc::NegativeInput,
            "scale_importance requires non-negative entries");
    total += v;
  }
  std::vector<double> scaled(raw.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = raw[i] / total;
  }
  return scaled;
}

ImportanceReport gain_importance(const Ensemble& model) {
  std::vector<double> raw(model.features.size(), 0.0);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf) raw[node.rule.feature] += node.gain;
    }
  }
  if (!model.trees.empty()) {
    for (auto& v : raw) v /= static_cast<double>(model.trees.size());
  }
  return make_report(MeasureKind::Gain, std::move(raw));
}

ImportanceReport split_count_importance(const Ensemble& model) {
  std::vector<double> raw(model.features.size(), 0.0);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf) raw[node.rule.feature] += 1.0;
    }
  }
  return make_report(MeasureKind::SplitCount, std::move(raw));
}

ImportanceReport cover_importance(const Ensemble& model) {
  std::vector<double> raw(model.features.size(), 0.0);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf) raw[node.rule.feature] += static_cast<double>(node.cover);
    }
  }
  return make_report(MeasureKind::Cover, std::move(raw));
}

ImportanceReport permutation_importance(const Ensemble& model,
                                        const Dataset& data,
                                        std::size_t n_permutations,
                                        Metric metric, std::uint64_t seed,
                                        EvalSet evaluation_set, int jobs) {
  if (n_permutations < 1)
    raise(Errc::InvalidConfig, "n_permutations must be at least 1");
  const bool ok = (metric == Metric::LogLoss) == (model.loss == LossKind::LogLoss);
  if (!ok)
    raise(Errc::MetricIncompatible,
          std::string("metric ") + metric_name(metric) +
              " is incompatible with loss " + loss_name(model.loss));
  if (data.n_features() != model.features.size())
    raise(Errc::FeatureCountMismatch,
          "data does not match the model's feature count");

  const double baseline = evaluate(model, data, metric);
  const std::size_t n_features = data.n_features();
  std::vector<double> deltas(n_features * n_permutations, 0.0);

  parallel_for(n_features * n_permutations, jobs, [&](std::size_t cell) {
    const std::size_t j = cell / n_permutations;
    const std::size_t r = cell % n_permutations;
    Rng rng(mix_seed({seed,
                      static_cast<std::uint64_t>(SeedDomain::Permutation), j,
                      r}));
    ColumnOverride ov;
    ov.feature = static_cast<int>(j);
    std::vector<double> shuffled_numeric;
    std::vector<std::int32_t> shuffled_codes;
    if (data.features[j].kind == ColumnKind::Numeric) {
      shuffled_numeric = data.features[j].numeric;
      rng.shuffle(shuffled_numeric);
      ov.numeric = shuffled_numeric.data();
    } else {
      shuffled_codes = data.features[j].codes;
      rng.shuffle(shuffled_codes);
      ov.codes = shuffled_codes.data();
    }
    deltas[cell] = evaluate_with_override(model, data, metric, ov) - baseline;
  });

  ImportanceReport report;
  report.measure = MeasureKind::Pfi;
  report.n_permutations = n_permutations;
  report.evaluation_set = evaluation_set;
  report.metric = metric;
  report.raw_signed.resize(n_features, 0.0);
  report.std_dev.resize(n_features, 0.0);
  report.raw.resize(n_features, 0.0);
  for (std::size_t j = 0; j < n_features; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < n_permutations; ++r)
      s += deltas[j * n_permutations + r];
    const double mu = s / static_cast<double>(n_permutations);
    report.raw_signed[j] = mu;
    if (n_permutations > 1) {
      double ss = 0.0;
      for (std::size_t r = 0; r < n_permutations; ++r) {
        const double d = deltas[j * n_permutations + r] - mu;
        ss += d * d;
      }
      report.std_dev[j] =
          std::sqrt(ss / static_cast<double>(n_permutations - 1));
    }
    report.raw[j] = std::max(0.0, mu);  // negative PFI counts as zero
  }
  report.scaled = scale_importance(report.raw);
  return report;
}

const char* measure_name(MeasureKind measure) {
  switch (measure) {
    case MeasureKind::Gain: return "gain";
    case MeasureKind::SplitCount: return "split_count";
    case MeasureKind::Cover: return "cover";
    case MeasureKind::Pfi: return "pfi";
  }
  return "?";
}

const char* eval_set_name(EvalSet set) {
  return set == EvalSet::Train ? "train" : "test";
}

std::string report_to_csv(const ImportanceReport& report,
                          const std::vector<std::string>& feature_names) {
  std::string out = "measure,feature,raw,scaled,std,evaluation_set\n";
  const bool pfi = report.measure == MeasureKind::Pfi;
  for (std::size_t j = 0; j < report.raw.size(); ++j) {
    out += csv::format_row(
        {measure_name(report.measure), feature_names[j],
         csv::format_double(report.raw[j]), csv::format_double(report.scaled[j]),
         pfi ? csv::format_double(report.std_dev[j]) : "",
         pfi && report.evaluation_set ? eval_set_name(*report.evaluation_set)
                                      : ""});
  }
  return out;
}

std::string report_to_json(const ImportanceReport& report,
                           const std::vector<std::string>& feature_names) {
  nlohmann::json doc;
  doc["measure"] = measure_name(report.measure);
  if (report.measure == MeasureKind::Pfi) {
    doc["n_permutations"] = report.n_permutations;
    if (report.evaluation_set)
      doc["evaluation_set"] = eval_set_name(*report.evaluation_set);
    if (report.metric) doc["metric"] = metric_name(*report.metric);
  }
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t j = 0; j < report.raw.size(); ++j) {
    nlohmann::json jf;
    jf["name"] = feature_names[j];
    jf["raw"] = report.raw[j];
    jf["scaled"] = report.scaled[j];
    if (report.measure == MeasureKind::Pfi) {
      jf["std"] = report.std_dev[j];
      jf["raw_signed"] = report.raw_signed[j];
    }
    features.push_back(std::move(jf));
  }
  doc["features"] = std::move(features);
  return doc.dump();
}

}  // namespace cvboost
