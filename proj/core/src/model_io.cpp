#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cvboost/boosting.hpp"
#include "cvboost/errors.hpp"
#include "cvboost/version.hpp"

namespace cvboost {

namespace {

using nlohmann::json;

json node_to_json(const Tree& tree, int idx) {
  const auto& node = tree.nodes[idx];
  if (node.is_leaf) {
    return json{{"leaf", node.value}, {"count", node.count}};
  }
  json j;
  j["feature"] = node.rule.feature;
  if (node.rule.is_categorical) {
    j["left_codes"] = node.rule.left_codes;
  } else {
    j["threshold"] = node.rule.threshold;
  }
  j["gain"] = node.gain;
  j["cover"] = node.cover;
  j["unseen_goes_left"] = node.unseen_goes_left;
  j["left"] = node_to_json(tree, node.left);
  j["right"] = node_to_json(tree, node.right);
  return j;
}

[[noreturn]] void malformed(const std::string& what) {
  raise(Errc::MalformedModel, "malformed model: " + what);
}

int json_to_node(const json& j, Tree& tree) {
  if (!j.is_object()) malformed("node is not an object");
  const int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes.back().node_id = static_cast<std::size_t>(idx);
  if (j.contains("leaf")) {
    if (!j.contains("count")) malformed("leaf without count");
    tree.nodes[idx].is_leaf = true;
    tree.nodes[idx].value = j["leaf"].get<double>();
    tree.nodes[idx].count = j["count"].get<std::size_t>();
    return idx;
  }
  if (!j.contains("feature") || !j.contains("left") || !j.contains("right"))
    malformed("internal node is missing feature/left/right");
  auto& node = tree.nodes[idx];
  node.is_leaf = false;
  node.rule.feature = j["feature"].get<int>();
  if (j.contains("left_codes")) {
    node.rule.is_categorical = true;
    node.rule.left_codes = j["left_codes"].get<std::vector<std::int32_t>>();
  } else if (j.contains("threshold")) {
    node.rule.is_categorical = false;
    node.rule.threshold = j["threshold"].get<double>();
  } else {
    malformed("internal node needs threshold or left_codes");
  }
  node.gain = j.value("gain", 0.0);
  node.cover = j.value("cover", std::size_t{0});
  node.unseen_goes_left = j.value("unseen_goes_left", false);
  const int left = json_to_node(j["left"], tree);
  tree.nodes[idx].left = left;
  const int right = json_to_node(j["right"], tree);
  tree.nodes[idx].right = right;
  return idx;
}

}  // namespace

std::string model_to_json(const Ensemble& model) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["task"] = model.task == Task::Regression ? "regression" : "binary";
  doc["loss"] = loss_name(model.loss);
  doc["f0"] = model.f0;
  doc["learning_rate"] = model.learning_rate;
  json features = json::array();
  for (const auto& f : model.features) {
    json jf;
    jf["name"] = f.name;
    jf["type"] = f.kind == ColumnKind::Numeric ? "numeric" : "categorical";
    if (f.kind == ColumnKind::Categorical) jf["dictionary"] = f.dictionary;
    features.push_back(std::move(jf));
  }
  doc["features"] = std::move(features);
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(node_to_json(tree, 0));
  doc["trees"] = std::move(trees);
  return doc.dump();
}

Ensemble model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    malformed(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version"))
    malformed("missing format_version");
  if (!doc["format_version"].is_number_integer() ||
      doc["format_version"].get<int>() != kModelFormatVersion) {
    raise(Errc::IncompatibleVersion,
          "model format_version " + doc["format_version"].dump() +
              " is not supported (expected " +
              std::to_string(kModelFormatVersion) + ")");
  }
  try {
    Ensemble model;
    const auto task = doc.at("task").get<std::string>();
    if (task == "regression") {
      model.task = Task::Regression;
    } else if (task == "binary") {
      model.task = Task::BinaryClassification;
    } else {
      malformed("unknown task '" + task + "'");
    }
    const auto loss = doc.at("loss").get<std::string>();
    if (loss == "squared_error") {
      model.loss = LossKind::SquaredError;
    } else if (loss == "log_loss") {
      model.loss = LossKind::LogLoss;
    } else {
      malformed("unknown loss '" + loss + "'");
    }
    model.f0 = doc.at("f0").get<double>();
    model.learning_rate = doc.at("learning_rate").get<double>();
    for (const auto& jf : doc.at("features")) {
      FeatureMeta meta;
      meta.name = jf.at("name").get<std::string>();
      const auto type = jf.at("type").get<std::string>();
      if (type == "numeric") {
        meta.kind = ColumnKind::Numeric;
      } else if (type == "categorical") {
        meta.kind = ColumnKind::Categorical;
        meta.dictionary = jf.at("dictionary").get<std::vector<std::string>>();
      } else {
        malformed("unknown feature type '" + type + "'");
      }
      model.features.push_back(std::move(meta));
    }
    for (const auto& jt : doc.at("trees")) {
      Tree tree;
      tree.n_features = model.features.size();
      for (const auto& f : model.features) {
        tree.feature_cardinality.push_back(
            static_cast<std::int32_t>(f.dictionary.size()));
      }
      json_to_node(jt, tree);
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf && (node.rule.feature < 0 ||
                              node.rule.feature >=
                                  static_cast<int>(model.features.size()))) {
          malformed("split references feature " +
                    std::to_string(node.rule.feature));
        }
      }
      model.trees.push_back(std::move(tree));
    }
    model.n_trees_budget = model.trees.size();
    return model;
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

void save_model(const Ensemble& model, const std::string& path) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot write " + tmp);
    out << model_to_json(model) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Errc::IoError, "cannot rename " + tmp + " to " + path);
}

Ensemble load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace cvboost
