#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvboost/errors.hpp"

namespace cvboost {

enum class ColumnKind { Numeric, Categorical };
enum class Task { Regression, BinaryClassification };

struct Schema {
  struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
  };
  std::vector<Column> columns;  // feature columns; target listed separately
  std::string target;
  Task task = Task::Regression;

  // Parses the sidecar JSON:
  //   {"target": name, "task": "regression"|"binary",
  //    "columns": {name: "numeric"|"categorical"}}
  static Schema from_json_file(const std::string& path);
  static Schema from_json_text(const std::string& text);
};

// One feature column. Categorical columns hold dense codes in
// [0, dictionary.size()); code dictionary.size() is the UNSEEN sentinel
// produced by encode_unseen for labels absent from a training dictionary.
struct FeatureColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> numeric;
  std::vector<std::int32_t> codes;
  std::vector<std::string> dictionary;  // code -> label

  std::int32_t cardinality() const {
    return static_cast<std::int32_t>(dictionary.size());
  }
};

// Columnar table plus target vector. Immutable after construction by
// convention; every operation below returns a new Dataset.
struct Dataset {
  std::vector<FeatureColumn> features;
  std::vector<double> target;
  std::string target_name;
  Task task = Task::Regression;

  std::size_t n_rows() const { return target.size(); }
  std::size_t n_features() const { return features.size(); }
  int feature_index(const std::string& name) const;  // -1 when absent
};

struct FoldAssignment {
  std::vector<std::uint32_t> fold_of;  // local row index -> fold id in [0, T)
  std::uint32_t n_folds = 0;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Loads a CSV against the schema. Header must contain every schema column
// plus the target (order-insensitive); extra columns are ignored. Categorical
// labels map to dense codes in first-appearance order. Missing cells are a
// hard error. For BinaryClassification the target must be 0 or 1.
Dataset load_csv(const std::string& path, const Schema& schema);
Dataset load_csv_text(const std::string& text, const Schema& schema);

// Same parse, but categorical codes come from the supplied dictionaries
// (unseen labels get the sentinel code K_j) and the target column is
// optional: absent targets are filled with NaN. Used for prediction inputs.
Dataset load_csv_with_dictionaries(const std::string& path,
                                   const Schema& schema,
                                   const std::vector<std::vector<std::string>>& dictionaries,
                                   bool require_target);

// Re-encodes the categorical columns of `data` against training
// dictionaries; labels absent from the dictionary get code K_j (UNSEEN).
// Numeric columns pass through untouched.
Dataset encode_unseen(const Dataset& data,
                      const std::vector<std::vector<std::string>>& train_dictionaries);

// Uniformly shuffled partition of n rows into T near-equal folds,
// deterministic in (seed, tree_idx, node_id). Fold sizes differ by at most 1.
FoldAssignment assign_folds(std::size_t n, std::size_t n_folds,
                            std::uint64_t seed, std::size_t tree_idx,
                            std::size_t node_id);

// K disjoint test folds covering all rows exactly once. Each train fold is
// re-encoded to dense codes (first appearance within the fold) and the test
// fold is encoded against the train dictionaries, so unseen test-time
// categories get the sentinel. Deterministic in (dataset, K, seed).
std::vector<TrainTestSplit> kfold_split(const Dataset& data, std::size_t k,
                                        std::uint64_t seed);

// Row-level pieces of kfold_split, exposed so harnesses can build folds
// lazily instead of materialising all K copies at once.
FoldAssignment kfold_assignment(std::size_t n, std::size_t k,
                                std::uint64_t seed);
TrainTestSplit make_fold(const Dataset& data, const FoldAssignment& folds,
                         std::uint32_t fold_id);

// Keeps every column except the named ones. UnknownFeature if a name does
// not exist or names the target.
Dataset drop_features(const Dataset& data,
                      const std::vector<std::string>& names);

// Serialises a dataset back to CSV (header row, RFC-4180 quoting);
// categorical cells are written as their labels.
std::string dataset_to_csv(const Dataset& data);

}  // namespace cvboost
