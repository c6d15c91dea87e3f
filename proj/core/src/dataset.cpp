#include "cvboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "cvboost/csv.hpp"
#include "cvboost/rng.hpp"

namespace cvboost {

namespace {

using Records = std::vector<std::vector<std::string>>;

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string cell_ref(std::size_t record, const std::string& column) {
  return "row " + std::to_string(record) + ", column '" + column + "'";
}

// Shared CSV -> Dataset path. When `dictionaries` is non-null, categorical
// codes come from it (unseen labels -> K_j); otherwise dictionaries are
// built in first-appearance order.
Dataset build_dataset(const Records& records, const Schema& schema,
                      const std::vector<std::vector<std::string>>* dictionaries,
                      bool require_target) {
  if (records.empty()) raise(Errc::MalformedCsv, "empty CSV: no header row");
  const auto& header = records.front();

  std::unordered_map<std::string, std::size_t> header_pos;
  for (std::size_t i = 0; i < header.size(); ++i) header_pos[header[i]] = i;

  std::unordered_map<std::string, ColumnKind> declared;
  for (const auto& col : schema.columns) declared[col.name] = col.kind;

  for (const auto& col : schema.columns) {
    if (!header_pos.count(col.name))
      raise(Errc::MissingColumn, "column '" + col.name + "' not found in CSV header");
  }
  const bool has_target = header_pos.count(schema.target) > 0;
  if (require_target && !has_target)
    raise(Errc::MissingColumn, "target column '" + schema.target + "' not found in CSV header");

  Dataset data;
  data.target_name = schema.target;
  data.task = schema.task;

  // Feature order follows the CSV header, restricted to declared columns.
  struct Binding {
    std::size_t csv_col;
    std::size_t feature;
  };
  std::vector<Binding> bindings;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.target) continue;
    const auto it = declared.find(header[i]);
    if (it == declared.end()) continue;  // extra column, ignored
    FeatureColumn col;
    col.name = header[i];
    col.kind = it->second;
    bindings.push_back({i, data.features.size()});
    data.features.push_back(std::move(col));
    declared.erase(it);  // duplicate header names bind to the first occurrence
  }

  const std::size_t n_records = records.size() - 1;
  std::vector<std::unordered_map<std::string, std::int32_t>> code_of(
      data.features.size());
  if (dictionaries) {
    if (dictionaries->size() != data.features.size())
      raise(Errc::MalformedModel, "dictionary count does not match feature count");
    for (std::size_t j = 0; j < data.features.size(); ++j) {
      data.features[j].dictionary = (*dictionaries)[j];
      for (std::size_t c = 0; c < (*dictionaries)[j].size(); ++c)
        code_of[j][(*dictionaries)[j][c]] = static_cast<std::int32_t>(c);
    }
  }

  for (auto& col : data.features) {
    if (col.kind == ColumnKind::Numeric)
      col.numeric.reserve(n_records);
    else
      col.codes.reserve(n_records);
  }
  data.target.reserve(n_records);

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      raise(Errc::MalformedCsv, "row " + std::to_string(r) + " has " +
                                    std::to_string(rec.size()) +
                                    " fields, header has " +
                                    std::to_string(header.size()));
    }
    for (const auto& b : bindings) {
      auto& col = data.features[b.feature];
      const std::string& cell = rec[b.csv_col];
      if (cell.empty())
        raise(Errc::MissingValue, "missing value at " + cell_ref(r, col.name));
      if (col.kind == ColumnKind::Numeric) {
        double v;
        if (!parse_double(cell, v))
          raise(Errc::UnparseableNumeric,
                "cannot parse '" + cell + "' at " + cell_ref(r, col.name));
        col.numeric.push_back(v);
      } else {
        auto& codes = code_of[b.feature];
        const auto it = codes.find(cell);
        if (it != codes.end()) {
          col.codes.push_back(it->second);
        } else if (dictionaries) {
          col.codes.push_back(col.cardinality());  // UNSEEN sentinel
        } else {
          const auto code = static_cast<std::int32_t>(col.dictionary.size());
          col.dictionary.push_back(cell);
          codes.emplace(cell, code);
          col.codes.push_back(code);
        }
      }
    }
    if (has_target) {
      const std::string& cell = rec[header_pos[schema.target]];
      if (cell.empty())
        raise(Errc::MissingValue,
              "missing value at " + cell_ref(r, schema.target));
      double v;
      if (!parse_double(cell, v)) {
        if (schema.task == Task::BinaryClassification)
          raise(Errc::NonBinaryTarget, "target '" + cell + "' at " +
                                           cell_ref(r, schema.target) +
                                           " is not 0 or 1");
        raise(Errc::UnparseableNumeric,
              "cannot parse '" + cell + "' at " + cell_ref(r, schema.target));
      }
      if (schema.task == Task::BinaryClassification && v != 0.0 && v != 1.0)
        raise(Errc::NonBinaryTarget, "target '" + cell + "' at " +
                                         cell_ref(r, schema.target) +
                                         " is not 0 or 1");
      data.target.push_back(v);
    } else {
      data.target.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return data;
}

}  // namespace

int Dataset::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < features.size(); ++j)
    if (features[j].name == name) return static_cast<int>(j);
  return -1;
}

Schema Schema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open schema file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

Schema Schema::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::MalformedSchema, std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("target") || !doc.contains("task") ||
      !doc.contains("columns") || !doc["columns"].is_object() ||
      !doc["target"].is_string() || !doc["task"].is_string()) {
    raise(Errc::MalformedSchema,
          "schema must be {\"target\": name, \"task\": \"regression\"|\"binary\", "
          "\"columns\": {name: type}}");
  }
  Schema s;
  s.target = doc["target"].get<std::string>();
  const auto task = doc["task"].get<std::string>();
  if (task == "regression") {
    s.task = Task::Regression;
  } else if (task == "binary") {
    s.task = Task::BinaryClassification;
  } else {
    raise(Errc::MalformedSchema, "unknown task '" + task + "'");
  }
  for (const auto& [name, value] : doc["columns"].items()) {
    if (name == s.target) continue;  // target type is implied by the task
    if (!value.is_string())
      raise(Errc::MalformedSchema, "column '" + name + "' type must be a string");
    const auto type = value.get<std::string>();
    if (type == "numeric") {
      s.columns.push_back({name, ColumnKind::Numeric});
    } else if (type == "categorical") {
      s.columns.push_back({name, ColumnKind::Categorical});
    } else {
      raise(Errc::MalformedSchema, "column '" + name + "' has unknown type '" + type + "'");
    }
  }
  return s;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
  return build_dataset(csv::read_file(path), schema, nullptr, true);
}

Dataset load_csv_text(const std::string& text, const Schema& schema) {
  return build_dataset(csv::parse(text), schema, nullptr, true);
}

Dataset load_csv_with_dictionaries(
    const std::string& path, const Schema& schema,
    const std::vector<std::vector<std::string>>& dictionaries,
    bool require_target) {
  return build_dataset(csv::read_file(path), schema, &dictionaries,
                       require_target);
}

Dataset encode_unseen(
    const Dataset& data,
    const std::vector<std::vector<std::string>>& train_dictionaries) {
  if (train_dictionaries.size() != data.n_features())
    raise(Errc::FeatureCountMismatch,
          "dictionary count does not match feature count");
  Dataset out = data;
  for (std::size_t j = 0; j < out.features.size(); ++j) {
    auto& col = out.features[j];
    if (col.kind != ColumnKind::Categorical) continue;
    const auto& dict = train_dictionaries[j];
    std::unordered_map<std::string, std::int32_t> code_of;
    for (std::size_t c = 0; c < dict.size(); ++c)
      code_of[dict[c]] = static_cast<std::int32_t>(c);
    const auto sentinel = static_cast<std::int32_t>(dict.size());
    for (auto& code : col.codes) {
      if (code < 0 || code >= col.cardinality()) {
        code = sentinel;  // was already out of dictionary
        continue;
      }
      const auto it = code_of.find(col.dictionary[code]);
      code = it == code_of.end() ? sentinel : it->second;
    }
    col.dictionary = dict;
  }
  return out;
}

FoldAssignment assign_folds(std::size_t n, std::size_t n_folds,
                            std::uint64_t seed, std::size_t tree_idx,
                            std::size_t node_id) {
  if (n_folds < 2) raise(Errc::InvalidConfig, "fold count must be at least 2");
  if (n < n_folds)
    raise(Errc::TooFewRows, "cannot split " + std::to_string(n) +
                                " rows into " + std::to_string(n_folds) +
                                " folds");
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(mix_seed({seed, static_cast<std::uint64_t>(SeedDomain::NodeFolds),
                    tree_idx, node_id}));
  rng.shuffle(perm);
  FoldAssignment folds;
  folds.n_folds = static_cast<std::uint32_t>(n_folds);
  folds.fold_of.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    folds.fold_of[perm[i]] = static_cast<std::uint32_t>(i % n_folds);
  return folds;
}

FoldAssignment kfold_assignment(std::size_t n, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) raise(Errc::InvalidConfig, "fold count must be at least 2");
  if (n < k)
    raise(Errc::TooFewRows, "cannot split " + std::to_string(n) +
                                " rows into " + std::to_string(k) + " folds");
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(mix_seed({seed, static_cast<std::uint64_t>(SeedDomain::KFold), n, k}));
  rng.shuffle(perm);
  FoldAssignment folds;
  folds.n_folds = static_cast<std::uint32_t>(k);
  folds.fold_of.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    folds.fold_of[perm[i]] = static_cast<std::uint32_t>(i % k);
  return folds;
}

namespace {

Dataset take_rows_reencoded(const Dataset& data,
                            const std::vector<std::uint32_t>& rows) {
  Dataset out;
  out.target_name = data.target_name;
  out.task = data.task;
  out.target.reserve(rows.size());
  for (auto i : rows) out.target.push_back(data.target[i]);
  for (const auto& col : data.features) {
    FeatureColumn c;
    c.name = col.name;
    c.kind = col.kind;
    if (col.kind == ColumnKind::Numeric) {
      c.numeric.reserve(rows.size());
      for (auto i : rows) c.numeric.push_back(col.numeric[i]);
    } else {
      c.codes.reserve(rows.size());
      std::vector<std::int32_t> remap(col.dictionary.size(), -1);
      for (auto i : rows) {
        const auto old_code = col.codes[i];
        if (remap[old_code] < 0) {
          remap[old_code] = static_cast<std::int32_t>(c.dictionary.size());
          c.dictionary.push_back(col.dictionary[old_code]);
        }
        c.codes.push_back(remap[old_code]);
      }
    }
    out.features.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TrainTestSplit make_fold(const Dataset& data, const FoldAssignment& folds,
                         std::uint32_t fold_id) {
  std::vector<std::uint32_t> train_rows, test_rows;
  for (std::size_t i = 0; i < folds.fold_of.size(); ++i) {
    (folds.fold_of[i] == fold_id ? test_rows : train_rows)
        .push_back(static_cast<std::uint32_t>(i));
  }
  TrainTestSplit split;
  split.train = take_rows_reencoded(data, train_rows);
  Dataset raw_test = take_rows_reencoded(data, test_rows);
  std::vector<std::vector<std::string>> train_dicts;
  train_dicts.reserve(split.train.features.size());
  for (const auto& col : split.train.features)
    train_dicts.push_back(col.dictionary);
  split.test = encode_unseen(raw_test, train_dicts);
  return split;
}

std::vector<TrainTestSplit> kfold_split(const Dataset& data, std::size_t k,
                                        std::uint64_t seed) {
  const auto folds = kfold_assignment(data.n_rows(), k, seed);
  std::vector<TrainTestSplit> out;
  out.reserve(k);
  for (std::uint32_t f = 0; f < folds.n_folds; ++f)
    out.push_back(make_fold(data, folds, f));
  return out;
}

Dataset drop_features(const Dataset& data,
                      const std::vector<std::string>& names) {
  for (const auto& name : names) {
    if (data.feature_index(name) < 0)
      raise(Errc::UnknownFeature, "unknown feature '" + name + "'");
  }
  Dataset out;
  out.target_name = data.target_name;
  out.task = data.task;
  out.target = data.target;
  for (const auto& col : data.features) {
    if (std::find(names.begin(), names.end(), col.name) == names.end())
      out.features.push_back(col);
  }
  return out;
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  std::vector<std::string> row;
  for (const auto& col : data.features) row.push_back(col.name);
  row.push_back(data.target_name);
  out += csv::format_row(row);
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    row.clear();
    for (const auto& col : data.features) {
      if (col.kind == ColumnKind::Numeric) {
        row.push_back(csv::format_double(col.numeric[i]));
      } else {
        row.push_back(col.dictionary[col.codes[i]]);
      }
    }
    row.push_back(csv::format_double(data.target[i]));
    out += csv::format_row(row);
  }
  return out;
}

}  // namespace cvboost
