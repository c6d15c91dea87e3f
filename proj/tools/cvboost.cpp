// cvboost: train/predict/importance for gradient-boosted trees with either
// training-gain or cross-validated split selection, plus the simulation,
// ablation, and benchmarking harness.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvboost/boosting.hpp"
#include "cvboost/csv.hpp"
#include "cvboost/dataset.hpp"
#include "cvboost/errors.hpp"
#include "cvboost/experiments.hpp"
#include "cvboost/importance.hpp"
#include "cvboost/version.hpp"

namespace {

using namespace cvboost;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

void write_atomic(const std::string& path, const std::string& content) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot write " + tmp);
    out << content;
    if (!out.flush()) raise(Errc::IoError, "cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Errc::IoError, "cannot rename " + tmp + " to " + path);
}

// Reproduction manifest next to each output file: resolved flags before the
// work starts, wall time and run stats after it finishes.
class Manifest {
 public:
  Manifest(std::string out_path, std::string command)
      : path_(std::move(out_path) + ".manifest.json") {
    doc_["artifact_version"] = kVersion;
    doc_["command"] = std::move(command);
    doc_["flags"] = json::object();
  }

  json& flags() { return doc_["flags"]; }

  void start() {
    doc_["status"] = "running";
    write_atomic(path_, doc_.dump(2) + "\n");
    t0_ = std::chrono::steady_clock::now();
  }

  void finish(json stats = json::object()) {
    doc_["status"] = "complete";
    doc_["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
            .count();
    doc_["stats"] = std::move(stats);
    write_atomic(path_, doc_.dump(2) + "\n");
  }

 private:
  std::string path_;
  json doc_;
  std::chrono::steady_clock::time_point t0_;
};

int default_jobs() {
  if (const char* env = std::getenv("CVBOOST_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<MethodKind> parse_methods(const std::string& text) {
  std::vector<MethodKind> out;
  for (const auto& token : split_list(text)) {
    if (token == "cvb") {
      out.push_back(MethodKind::Cvb);
    } else if (token == "gain" || token == "train_gain") {
      out.push_back(MethodKind::TrainGain);
    } else {
      raise(Errc::InvalidConfig,
            "--methods: unknown method '" + token + "' (use cvb, gain)");
    }
  }
  if (out.empty()) raise(Errc::InvalidConfig, "--methods: empty list");
  return out;
}

std::vector<SimMeasure> parse_measures(const std::string& text) {
  std::vector<SimMeasure> out;
  for (const auto& token : split_list(text)) {
    if (token == "gain") {
      out.push_back(SimMeasure::Gain);
    } else if (token == "split_count") {
      out.push_back(SimMeasure::SplitCount);
    } else if (token == "cover") {
      out.push_back(SimMeasure::Cover);
    } else if (token == "pfi_train") {
      out.push_back(SimMeasure::PfiTrain);
    } else if (token == "pfi_test") {
      out.push_back(SimMeasure::PfiTest);
    } else {
      raise(Errc::InvalidConfig, "--measures: unknown measure '" + token + "'");
    }
  }
  if (out.empty()) raise(Errc::InvalidConfig, "--measures: empty list");
  return out;
}

// Shared model hyper-parameter flags (train, ablate, bench).
struct HyperFlags {
  std::size_t trees = 100;
  double learning_rate = 0.1;
  std::size_t depth = 3;
  std::size_t folds = 5;
  std::size_t min_samples_split = 0;  // 0 = per-selector default
  std::size_t min_samples_leaf = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "Number of boosting rounds")
        ->capture_default_str();
    cmd->add_option("--learning-rate", learning_rate, "Shrinkage in (0,1]")
        ->capture_default_str();
    cmd->add_option("--depth", depth, "Maximum tree depth")
        ->capture_default_str();
    cmd->add_option("--folds", folds, "CV folds (T) for the cv selector")
        ->capture_default_str();
    cmd->add_option("--min-samples-split", min_samples_split,
                    "Minimum rows to split a node (default: 2, or 2*T for cv)");
    cmd->add_option("--min-samples-leaf", min_samples_leaf,
                    "Minimum rows per leaf")
        ->capture_default_str();
  }

  BoostParams resolve(SplitSelector selector, LossKind loss,
                      std::uint64_t seed) const {
    BoostParams params;
    params.n_trees = trees;
    params.learning_rate = learning_rate;
    params.loss = loss;
    params.seed = seed;
    params.growth.max_depth = depth;
    params.growth.min_samples_leaf = min_samples_leaf;
    params.growth.cv_folds = folds;
    params.growth.selector = selector;
    const std::size_t floor =
        selector == SplitSelector::CrossValidated ? 2 * folds : 2;
    if (min_samples_split == 0) {
      params.growth.min_samples_split = floor;
    } else {
      if (selector == SplitSelector::CrossValidated &&
          min_samples_split < 2 * folds) {
        raise(Errc::InvalidConfig,
              "--min-samples-split " + std::to_string(min_samples_split) +
                  " violates the cv bound 2 * --folds = " +
                  std::to_string(2 * folds));
      }
      params.growth.min_samples_split = min_samples_split;
    }
    return params;
  }

  void record(json& flags) const {
    flags["trees"] = trees;
    flags["learning_rate"] = learning_rate;
    flags["depth"] = depth;
    flags["folds"] = folds;
    flags["min_samples_split"] = min_samples_split;
    flags["min_samples_leaf"] = min_samples_leaf;
  }
};

Metric task_metric(Task task, bool rmse_for_regression) {
  if (task == Task::BinaryClassification) return Metric::LogLoss;
  return rmse_for_regression ? Metric::Rmse : Metric::Mse;
}

// Reorders a loaded dataset's columns to the model's feature order.
Dataset align_to_model(Dataset data, const Ensemble& model) {
  Dataset out;
  out.target = std::move(data.target);
  out.target_name = data.target_name;
  out.task = model.task;
  for (const auto& meta : model.features) {
    const int idx = data.feature_index(meta.name);
    if (idx < 0)
      raise(Errc::MissingColumn,
            "data is missing model feature '" + meta.name + "'");
    if (data.features[idx].kind != meta.kind)
      raise(Errc::MissingColumn,
            "feature '" + meta.name + "' has the wrong type for this model");
    out.features.push_back(std::move(data.features[idx]));
  }
  return out;
}

Schema schema_for_model(const Ensemble& model, const std::string& target) {
  Schema schema;
  schema.target = target;
  schema.task = model.task;
  for (const auto& meta : model.features)
    schema.columns.push_back({meta.name, meta.kind});
  return schema;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data, schema, selector, out;
  HyperFlags hyper;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& args) {
  const auto schema = Schema::from_json_file(args.schema);
  const auto selector = args.selector == "cv" ? SplitSelector::CrossValidated
                                              : SplitSelector::TrainGain;
  const auto loss = schema.task == Task::BinaryClassification
                        ? LossKind::LogLoss
                        : LossKind::SquaredError;
  const auto params = args.hyper.resolve(selector, loss, args.seed);

  Manifest manifest(args.out, "train");
  manifest.flags()["data"] = args.data;
  manifest.flags()["schema"] = args.schema;
  manifest.flags()["selector"] = args.selector;
  manifest.flags()["out"] = args.out;
  manifest.flags()["seed"] = args.seed;
  args.hyper.record(manifest.flags());
  manifest.flags()["min_samples_split_resolved"] =
      params.growth.min_samples_split;
  manifest.start();

  const auto data = load_csv(args.data, schema);
  const auto model = fit(data, params);
  write_atomic(args.out, model_to_json(model) + "\n");

  const auto metric = default_metric(model);
  const double train_error = evaluate(model, data, metric);
  std::cout << "train_error=" << csv::format_double(train_error)
            << " metric=" << metric_name(metric)
            << " n_trees_fitted=" << model.n_trees_fitted()
            << " trees_budget=" << params.n_trees << "\n";

  manifest.finish({{"train_error", train_error},
                   {"metric", metric_name(metric)},
                   {"n_trees_fitted", model.n_trees_fitted()},
                   {"n_rows", data.n_rows()}});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string model, data, out;
};

int cmd_predict(const PredictArgs& args) {
  Manifest manifest(args.out, "predict");
  manifest.flags()["model"] = args.model;
  manifest.flags()["data"] = args.data;
  manifest.flags()["out"] = args.out;
  manifest.start();

  const auto model = load_model(args.model);

  const auto schema = schema_for_model(model, "");
  const auto data = align_to_model(
      load_csv_with_dictionaries(args.data, schema, model.dictionaries(),
                                 /*require_target=*/false),
      model);

  const auto raw = predict_raw(model, data);
  std::string out;
  if (model.task == Task::BinaryClassification) {
    const auto proba = predict_proba(model, data);
    out = "raw,probability\n";
    for (std::size_t i = 0; i < raw.size(); ++i) {
      out += csv::format_row(
          {csv::format_double(raw[i]), csv::format_double(proba[i])});
    }
  } else {
    out = "raw\n";
    for (double v : raw) out += csv::format_double(v) + "\n";
  }
  write_atomic(args.out, out);
  manifest.finish({{"n_rows", raw.size()}});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// importance
// ---------------------------------------------------------------------------

struct ImportanceArgs {
  std::string model, measure, out, data, schema, eval_set, format = "csv";
  std::size_t permutations = 20;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
};

int cmd_importance(const ImportanceArgs& args) {
  const bool pfi = args.measure == "pfi";
  if (pfi && args.data.empty())
    raise(Errc::InvalidConfig, "--measure pfi requires --data");
  if (pfi && args.schema.empty())
    raise(Errc::InvalidConfig, "--measure pfi requires --schema");
  if (pfi && args.eval_set.empty())
    raise(Errc::InvalidConfig, "--measure pfi requires --eval-set train|test");

  Manifest manifest(args.out, "importance");
  manifest.flags()["model"] = args.model;
  manifest.flags()["measure"] = args.measure;
  manifest.flags()["out"] = args.out;
  manifest.flags()["format"] = args.format;
  if (pfi) {
    manifest.flags()["data"] = args.data;
    manifest.flags()["schema"] = args.schema;
    manifest.flags()["eval_set"] = args.eval_set;
    manifest.flags()["permutations"] = args.permutations;
    manifest.flags()["seed"] = args.seed;
    manifest.flags()["jobs"] = args.jobs;
  }
  manifest.start();

  const auto model = load_model(args.model);
  ImportanceReport report;
  if (args.measure == "gain") {
    report = gain_importance(model);
  } else if (args.measure == "split-count") {
    report = split_count_importance(model);
  } else if (args.measure == "cover") {
    report = cover_importance(model);
  } else {
    const auto user_schema = Schema::from_json_file(args.schema);
    Schema schema = schema_for_model(model, user_schema.target);
    const auto data = align_to_model(
        load_csv_with_dictionaries(args.data, schema, model.dictionaries(),
                                   /*require_target=*/true),
        model);
    const auto eval_set =
        args.eval_set == "train" ? EvalSet::Train : EvalSet::Test;
    report = permutation_importance(model, data, args.permutations,
                                    default_metric(model), args.seed, eval_set,
                                    args.jobs);
  }

  std::vector<std::string> names;
  for (const auto& f : model.features) names.push_back(f.name);
  write_atomic(args.out, args.format == "json"
                             ? report_to_json(report, names) + "\n"
                             : report_to_csv(report, names));
  manifest.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string experiment, out;
  std::string methods = "cvb,gain";
  std::string measures = "gain,split_count,cover,pfi_train,pfi_test";
  double alpha = 0.0;
  bool alpha_set = false;
  std::size_t reps = 100;
  std::size_t n = 6000;
  std::size_t n_test = 2000;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
};

int cmd_simulate(const SimulateArgs& args) {
  if (args.experiment != "null" && args.experiment != "power")
    raise(Errc::InvalidConfig,
          "--experiment must be null or power, got '" + args.experiment + "'");
  if (args.experiment == "power" && !args.alpha_set)
    raise(Errc::InvalidConfig, "--experiment power requires --alpha");
  if (args.experiment == "null" && args.alpha_set)
    raise(Errc::InvalidConfig, "--alpha is only valid with --experiment power");

  const auto methods = parse_methods(args.methods);
  const auto measures = parse_measures(args.measures);

  StroblConfig config;
  config.n = args.n;
  config.n_test = args.n_test;
  config.reps = args.reps;
  config.seed = args.seed;
  config.alpha = args.experiment == "power" ? args.alpha : 0.0;

  Manifest manifest(args.out, "simulate");
  manifest.flags()["experiment"] = args.experiment;
  if (args.alpha_set) manifest.flags()["alpha"] = args.alpha;
  manifest.flags()["reps"] = args.reps;
  manifest.flags()["n"] = args.n;
  manifest.flags()["n_test"] = args.n_test;
  manifest.flags()["seed"] = args.seed;
  manifest.flags()["methods"] = args.methods;
  manifest.flags()["measures"] = args.measures;
  manifest.flags()["out"] = args.out;
  manifest.flags()["jobs"] = args.jobs;
  manifest.flags()["cardinalities"] = config.cardinalities;
  manifest.start();

  std::cerr << "simulate: " << args.experiment << ", " << args.reps
            << " reps, n=" << args.n << ", jobs=" << args.jobs << "\n";
  const auto report = run_bias_experiment(config, methods, measures, args.jobs);

  std::string out = "method,measure,feature,mean,std,reps\n";
  for (const auto& row : report.rows) {
    out += csv::format_row({method_name(row.method), row.measure, row.feature,
                            csv::format_double(row.mean),
                            csv::format_double(row.stddev),
                            std::to_string(row.reps)});
  }
  write_atomic(args.out, out);

  json stats = json::object();
  for (const auto& s : report.stats) {
    stats[method_name(s.method)] = {{"mean_trees_fitted", s.mean_trees_fitted},
                                    {"mean_test_error", s.mean_test_error}};
    std::cerr << "  " << method_name(s.method)
              << ": mean trees=" << s.mean_trees_fitted
              << ", mean test log-loss=" << s.mean_test_error << "\n";
  }
  manifest.finish(std::move(stats));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ablate / bench
// ---------------------------------------------------------------------------

struct AblateArgs {
  std::string data, schema, out;
  std::vector<std::string> drop;
  std::string methods = "cvb,gain";
  std::size_t kfolds = 10;
  bool log_target = false;
  std::uint64_t seed = 0;
  HyperFlags hyper;
  int jobs = default_jobs();
};

void apply_log_target(Dataset& data) {
  for (auto& y : data.target) {
    if (!(y > 0.0))
      raise(Errc::UnparseableNumeric,
            "--log-target requires strictly positive targets");
    y = std::log(y);
  }
}

int cmd_ablate(const AblateArgs& args) {
  const auto schema = Schema::from_json_file(args.schema);
  const auto methods = parse_methods(args.methods);
  if (args.log_target && schema.task != Task::Regression)
    raise(Errc::InvalidConfig, "--log-target applies to regression targets only");
  const auto loss = schema.task == Task::BinaryClassification
                        ? LossKind::LogLoss
                        : LossKind::SquaredError;
  const auto metric = task_metric(schema.task, /*rmse_for_regression=*/true);
  const auto shared = args.hyper.resolve(SplitSelector::TrainGain, loss, args.seed);

  Manifest manifest(args.out, "ablate");
  manifest.flags()["data"] = args.data;
  manifest.flags()["schema"] = args.schema;
  manifest.flags()["drop"] = args.drop;
  manifest.flags()["kfolds"] = args.kfolds;
  manifest.flags()["log_target"] = args.log_target;
  manifest.flags()["methods"] = args.methods;
  manifest.flags()["seed"] = args.seed;
  manifest.flags()["out"] = args.out;
  manifest.flags()["jobs"] = args.jobs;
  args.hyper.record(manifest.flags());
  manifest.start();

  auto data = load_csv(args.data, schema);
  if (args.log_target) apply_log_target(data);
  std::cerr << "ablate: " << data.n_rows() << " rows, " << args.kfolds
            << " folds, dropping " << args.drop.size() << " feature(s)\n";
  const auto rows = run_ablation(data, args.drop, args.kfolds, methods, metric,
                                 shared, args.jobs);

  std::string out = "method,feature_set,fold,error\n";
  for (const auto& row : rows) {
    out += csv::format_row({method_name(row.method), row.feature_set,
                            std::to_string(row.fold),
                            csv::format_double(row.error)});
  }
  write_atomic(args.out, out);
  manifest.finish({{"metric", metric_name(metric)}, {"n_rows", data.n_rows()}});
  return kExitOk;
}

struct BenchArgs {
  std::string data, schema, out;
  std::string methods = "cvb,gain";
  std::size_t kfolds = 10;
  bool log_target = false;
  std::uint64_t seed = 0;
  HyperFlags hyper;
  int jobs = default_jobs();
};

int cmd_bench(const BenchArgs& args) {
  const auto schema = Schema::from_json_file(args.schema);
  const auto methods = parse_methods(args.methods);
  if (args.log_target && schema.task != Task::Regression)
    raise(Errc::InvalidConfig, "--log-target applies to regression targets only");
  const auto loss = schema.task == Task::BinaryClassification
                        ? LossKind::LogLoss
                        : LossKind::SquaredError;
  const auto metric = task_metric(schema.task, /*rmse_for_regression=*/true);
  const auto shared = args.hyper.resolve(SplitSelector::TrainGain, loss, args.seed);

  Manifest manifest(args.out, "bench");
  manifest.flags()["data"] = args.data;
  manifest.flags()["schema"] = args.schema;
  manifest.flags()["kfolds"] = args.kfolds;
  manifest.flags()["log_target"] = args.log_target;
  manifest.flags()["methods"] = args.methods;
  manifest.flags()["seed"] = args.seed;
  manifest.flags()["out"] = args.out;
  manifest.flags()["jobs"] = args.jobs;
  args.hyper.record(manifest.flags());
  manifest.start();

  auto data = load_csv(args.data, schema);
  if (args.log_target) apply_log_target(data);
  std::cerr << "bench: " << data.n_rows() << " rows, " << args.kfolds
            << " folds, jobs=" << args.jobs << "\n";
  const auto results =
      run_error_benchmark(data, args.kfolds, methods, metric, shared, args.jobs);

  std::string out = "method,metric,mean,std,folds\n";
  json stats = json::object();
  for (const auto& res : results) {
    out += csv::format_row({method_name(res.method), metric_name(res.metric),
                            csv::format_double(res.mean),
                            csv::format_double(res.stddev),
                            std::to_string(args.kfolds)});
    stats[method_name(res.method)] = {
        {"mean_error", res.mean},
        {"std_error", res.stddev},
        {"mean_trees_fitted", res.mean_trees_fitted}};
    std::cerr << "  " << method_name(res.method) << ": "
              << metric_name(res.metric) << " " << res.mean << " (" << res.stddev
              << ")\n";
  }
  write_atomic(args.out, out);
  manifest.finish(std::move(stats));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-boosted trees with cross-validated split selection"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit a model and save it");
  train_cmd->add_option("--data", train_args.data, "Training CSV")->required();
  train_cmd->add_option("--schema", train_args.schema, "Schema sidecar JSON")
      ->required();
  train_cmd
      ->add_option("--selector", train_args.selector,
                   "Split selection: gain or cv")
      ->required()
      ->check(CLI::IsMember({"gain", "cv"}));
  train_cmd->add_option("--out", train_args.out, "Model output path")
      ->required();
  train_cmd->add_option("--seed", train_args.seed, "Random seed")
      ->capture_default_str();
  train_args.hyper.attach(train_cmd);

  PredictArgs predict_args;
  auto* predict_cmd =
      app.add_subcommand("predict", "Score rows with a saved model");
  predict_cmd->add_option("--model", predict_args.model, "Model file")
      ->required();
  predict_cmd->add_option("--data", predict_args.data, "Input CSV")->required();
  predict_cmd->add_option("--out", predict_args.out, "Predictions CSV path")
      ->required();

  ImportanceArgs imp_args;
  auto* imp_cmd =
      app.add_subcommand("importance", "Feature-importance report");
  imp_cmd->add_option("--model", imp_args.model, "Model file")->required();
  imp_cmd
      ->add_option("--measure", imp_args.measure,
                   "gain, split-count, cover, or pfi")
      ->required()
      ->check(CLI::IsMember({"gain", "split-count", "cover", "pfi"}));
  imp_cmd->add_option("--out", imp_args.out, "Report output path")->required();
  imp_cmd->add_option("--data", imp_args.data, "Evaluation CSV (pfi only)");
  imp_cmd->add_option("--schema", imp_args.schema, "Schema sidecar (pfi only)");
  imp_cmd
      ->add_option("--eval-set", imp_args.eval_set,
                   "Label for the PFI evaluation set: train or test")
      ->check(CLI::IsMember({"train", "test"}));
  imp_cmd->add_option("--permutations", imp_args.permutations,
                      "Permutations per feature")
      ->capture_default_str();
  imp_cmd->add_option("--seed", imp_args.seed, "Random seed")
      ->capture_default_str();
  imp_cmd->add_option("--format", imp_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  imp_cmd->add_option("--jobs", imp_args.jobs, "Worker threads");

  SimulateArgs sim_args;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Feature-importance bias simulations");
  sim_cmd
      ->add_option("--experiment", sim_args.experiment, "null or power")
      ->required();
  auto* alpha_opt =
      sim_cmd->add_option("--alpha", sim_args.alpha, "Signal strength in [0, 0.5]");
  sim_cmd->add_option("--reps", sim_args.reps, "Repetitions")
      ->capture_default_str();
  sim_cmd->add_option("--n", sim_args.n, "Training rows per repetition")
      ->capture_default_str();
  sim_cmd->add_option("--n-test", sim_args.n_test, "Test rows per repetition")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Random seed")
      ->capture_default_str();
  sim_cmd->add_option("--methods", sim_args.methods, "Comma list: cvb, gain")
      ->capture_default_str();
  sim_cmd
      ->add_option("--measures", sim_args.measures,
                   "Comma list: gain, split_count, cover, pfi_train, pfi_test")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim_args.out, "Report CSV path")->required();
  sim_cmd->add_option("--jobs", sim_args.jobs, "Worker threads");

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand(
      "ablate", "K-fold errors with and without dropped features");
  ablate_cmd->add_option("--data", ablate_args.data, "CSV file")->required();
  ablate_cmd->add_option("--schema", ablate_args.schema, "Schema sidecar JSON")
      ->required();
  ablate_cmd
      ->add_option("--drop", ablate_args.drop,
                   "Feature(s) to drop in the reduced set")
      ->required()
      ->delimiter(',');
  ablate_cmd->add_option("--kfolds", ablate_args.kfolds, "Fold count")
      ->capture_default_str();
  ablate_cmd->add_flag("--log-target", ablate_args.log_target,
                       "Natural-log transform of the regression target");
  ablate_cmd->add_option("--methods", ablate_args.methods, "Comma list")
      ->capture_default_str();
  ablate_cmd->add_option("--seed", ablate_args.seed, "Random seed")
      ->capture_default_str();
  ablate_cmd->add_option("--out", ablate_args.out, "Output CSV path")
      ->required();
  ablate_cmd->add_option("--jobs", ablate_args.jobs, "Worker threads");
  ablate_args.hyper.attach(ablate_cmd);

  BenchArgs bench_args;
  auto* bench_cmd =
      app.add_subcommand("bench", "K-fold error benchmark per method");
  bench_cmd->add_option("--data", bench_args.data, "CSV file")->required();
  bench_cmd->add_option("--schema", bench_args.schema, "Schema sidecar JSON")
      ->required();
  bench_cmd->add_option("--kfolds", bench_args.kfolds, "Fold count")
      ->capture_default_str();
  bench_cmd->add_flag("--log-target", bench_args.log_target,
                      "Natural-log transform of the regression target");
  bench_cmd->add_option("--methods", bench_args.methods, "Comma list")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "Random seed")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out, "Output CSV path")->required();
  bench_cmd->add_option("--jobs", bench_args.jobs, "Worker threads");
  bench_args.hyper.attach(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (predict_cmd->parsed()) return cmd_predict(predict_args);
    if (imp_cmd->parsed()) return cmd_importance(imp_args);
    if (sim_cmd->parsed()) {
      sim_args.alpha_set = alpha_opt->count() > 0;
      return cmd_simulate(sim_args);
    }
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
