#include "cvboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cvboost/errors.hpp"

namespace cvboost {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Candidate scoring during the scan runs on prefix sums; the winner's gain,
// counts and child means are then recomputed from the raw partition with the
// plain two-pass formula, so the reported gain is exactly the node SSE minus
// the impurity of the two children.
struct FinalizedSplit {
  double gain = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  double left_mean = 0.0;
  double right_mean = 0.0;
};

template <class GoesLeft>
FinalizedSplit finalize_split(std::span<const double> targets,
                              GoesLeft goes_left) {
  FinalizedSplit out;
  double left_sum = 0.0, right_sum = 0.0, total_sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    total_sum += targets[i];
    if (goes_left(i)) {
      left_sum += targets[i];
      ++out.left_count;
    } else {
      right_sum += targets[i];
      ++out.right_count;
    }
  }
  out.left_mean = left_sum / static_cast<double>(out.left_count);
  out.right_mean = right_sum / static_cast<double>(out.right_count);
  const double parent_mean = total_sum / static_cast<double>(targets.size());
  double parent_sse = 0.0, left_sse = 0.0, right_sse = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double dp = targets[i] - parent_mean;
    parent_sse += dp * dp;
    const double m = goes_left(i) ? out.left_mean : out.right_mean;
    const double dc = targets[i] - m;
    (goes_left(i) ? left_sse : right_sse) += dc * dc;
  }
  out.gain = parent_sse - (left_sse + right_sse);  // SSE minus impurity
  return out;
}

}  // namespace

double node_sse(std::span<const double> targets) {
  if (targets.empty()) raise(Errc::EmptyNode, "node_sse of an empty node");
  const double m = mean_of(targets);
  double s = 0.0;
  for (double x : targets) {
    const double d = x - m;
    s += d * d;
  }
  return s;
}

std::optional<SplitCandidate> best_numeric_split(
    std::span<const double> values, std::span<const double> targets,
    std::size_t min_samples_leaf) {
  const std::size_t n = values.size();
  if (n < 2 || n != targets.size()) return std::nullopt;

  // Sort indices by value, ties by row so prefix accumulation is stable.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });

  double total_sum = 0.0, total_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_sum += targets[order[i]];
    total_sq += targets[order[i]] * targets[order[i]];
  }
  const double parent_proxy =
      total_sq - total_sum * total_sum / static_cast<double>(n);

  double best_score = kNegInf;
  std::size_t best_k = 0;
  double prefix_sum = 0.0, prefix_sq = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double y = targets[order[k - 1]];
    prefix_sum += y;
    prefix_sq += y * y;
    if (values[order[k - 1]] == values[order[k]]) continue;
    if (k < min_samples_leaf || n - k < min_samples_leaf) continue;
    const double left_sse =
        prefix_sq - prefix_sum * prefix_sum / static_cast<double>(k);
    const double rs = total_sum - prefix_sum;
    const double right_sse =
        (total_sq - prefix_sq) - rs * rs / static_cast<double>(n - k);
    const double score = parent_proxy - left_sse - right_sse;
    if (score > best_score) {  // strict: first max has the smallest threshold
      best_score = score;
      best_k = k;
    }
  }
  if (best_k == 0) return std::nullopt;

  const double lo = values[order[best_k - 1]];
  const double hi = values[order[best_k]];
  double threshold = lo + (hi - lo) / 2.0;
  if (!(threshold < hi)) threshold = lo;  // midpoint rounded up to hi

  const auto fin = finalize_split(
      targets, [&](std::size_t i) { return values[i] <= threshold; });
  SplitCandidate cand;
  cand.rule.is_categorical = false;
  cand.rule.threshold = threshold;
  cand.gain = fin.gain;
  cand.left_count = fin.left_count;
  cand.right_count = fin.right_count;
  cand.left_mean = fin.left_mean;
  cand.right_mean = fin.right_mean;
  return cand;
}

std::optional<SplitCandidate> best_categorical_split(
    std::span<const std::int32_t> codes, std::span<const double> targets,
    std::int32_t n_codes, std::size_t min_samples_leaf) {
  const std::size_t n = codes.size();
  if (n < 2 || n != targets.size() || n_codes < 1) return std::nullopt;

  std::vector<std::size_t> count(n_codes, 0);
  std::vector<double> sum(n_codes, 0.0), sq(n_codes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = codes[i];
    ++count[c];
    sum[c] += targets[i];
    sq[c] += targets[i] * targets[i];
  }

  // Present categories ordered by mean response, ties by code.
  std::vector<std::int32_t> present;
  for (std::int32_t c = 0; c < n_codes; ++c)
    if (count[c] > 0) present.push_back(c);
  if (present.size() < 2) return std::nullopt;
  std::sort(present.begin(), present.end(),
            [&](std::int32_t a, std::int32_t b) {
              const double ma = sum[a] / static_cast<double>(count[a]);
              const double mb = sum[b] / static_cast<double>(count[b]);
              if (ma != mb) return ma < mb;
              return a < b;
            });

  double total_sum = 0.0, total_sq = 0.0;
  for (auto c : present) {
    total_sum += sum[c];
    total_sq += sq[c];
  }
  const double parent_proxy =
      total_sq - total_sum * total_sum / static_cast<double>(n);

  double best_score = kNegInf;
  std::size_t best_prefix = 0;
  double prefix_sum = 0.0, prefix_sq = 0.0;
  std::size_t prefix_n = 0;
  for (std::size_t k = 1; k < present.size(); ++k) {
    const auto c = present[k - 1];
    prefix_sum += sum[c];
    prefix_sq += sq[c];
    prefix_n += count[c];
    if (prefix_n < min_samples_leaf || n - prefix_n < min_samples_leaf)
      continue;
    const double left_sse =
        prefix_sq - prefix_sum * prefix_sum / static_cast<double>(prefix_n);
    const double rs = total_sum - prefix_sum;
    const double right_sse = (total_sq - prefix_sq) -
                             rs * rs / static_cast<double>(n - prefix_n);
    const double score = parent_proxy - left_sse - right_sse;
    if (score > best_score) {  // strict: first max is the shortest prefix
      best_score = score;
      best_prefix = k;
    }
  }
  if (best_prefix == 0) return std::nullopt;

  std::vector<char> in_left(n_codes, 0);
  SplitCandidate cand;
  cand.rule.is_categorical = true;
  cand.rule.left_codes.assign(present.begin(), present.begin() + best_prefix);
  std::sort(cand.rule.left_codes.begin(), cand.rule.left_codes.end());
  for (auto c : cand.rule.left_codes) in_left[c] = 1;

  const auto fin =
      finalize_split(targets, [&](std::size_t i) { return in_left[codes[i]] != 0; });
  cand.gain = fin.gain;
  cand.left_count = fin.left_count;
  cand.right_count = fin.right_count;
  cand.left_mean = fin.left_mean;
  cand.right_mean = fin.right_mean;
  return cand;
}

namespace {

struct NodeScratch {
  std::vector<double> values;
  std::vector<std::int32_t> codes;
  std::vector<double> targets;
};

void gather_targets(std::span<const double> targets,
                    std::span<const std::uint32_t> rows,
                    std::vector<double>& out) {
  out.clear();
  out.reserve(rows.size());
  for (auto i : rows) out.push_back(targets[i]);
}

std::optional<SplitCandidate> best_split_for_feature(
    const Dataset& data, std::span<const double> targets,
    std::span<const std::uint32_t> rows, int feature,
    std::size_t min_samples_leaf, NodeScratch& scratch) {
  const auto& col = data.features[feature];
  gather_targets(targets, rows, scratch.targets);
  std::optional<SplitCandidate> cand;
  if (col.kind == ColumnKind::Numeric) {
    scratch.values.clear();
    scratch.values.reserve(rows.size());
    for (auto i : rows) scratch.values.push_back(col.numeric[i]);
    cand = best_numeric_split(scratch.values, scratch.targets, min_samples_leaf);
  } else {
    scratch.codes.clear();
    scratch.codes.reserve(rows.size());
    for (auto i : rows) scratch.codes.push_back(col.codes[i]);
    cand = best_categorical_split(scratch.codes, scratch.targets,
                                  col.cardinality(), min_samples_leaf);
  }
  if (cand) cand->rule.feature = feature;
  return cand;
}

}  // namespace

std::optional<SplitCandidate> best_split_train(
    const Dataset& data, std::span<const double> targets,
    std::span<const std::uint32_t> rows, const GrowthParams& params) {
  NodeScratch scratch;
  std::optional<SplitCandidate> best;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    auto cand = best_split_for_feature(data, targets, rows,
                                       static_cast<int>(j),
                                       params.min_samples_leaf, scratch);
    if (!cand) continue;
    if (!best || cand->gain > best->gain) best = std::move(cand);
  }
  if (best && best->gain > 0.0) return best;
  return std::nullopt;
}

namespace {

// Rank plus the standard error of (rank - node SSE), estimated from the
// per-row differences between the held-out squared error and the in-sample
// squared error. The stop rule needs the error bar; the public rank does not.
struct CvRank {
  double rank = 0.0;
  double se = 0.0;
};

CvRank cv_rank_with_se(const Dataset& data, std::span<const double> targets,
                       std::span<const std::uint32_t> rows, int feature_idx,
                       const FoldAssignment& folds,
                       std::size_t min_samples_leaf) {
  const std::size_t n = rows.size();
  if (folds.fold_of.size() != n)
    raise(Errc::InvalidConfig, "fold assignment does not cover the node rows");
  const auto& col = data.features[feature_idx];
  const bool categorical = col.kind == ColumnKind::Categorical;

  double node_sum = 0.0;
  for (auto row : rows) node_sum += targets[row];
  const double node_mean = node_sum / static_cast<double>(n);

  std::vector<double> train_values, train_targets;
  std::vector<std::int32_t> train_codes;
  std::vector<char> seen;
  double rank = 0.0, diff_sum = 0.0, diff_sq = 0.0;

  for (std::uint32_t t = 0; t < folds.n_folds; ++t) {
    train_targets.clear();
    train_values.clear();
    train_codes.clear();
    if (categorical) seen.assign(col.cardinality(), 0);

    double train_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (folds.fold_of[i] == t) continue;
      const auto row = rows[i];
      train_targets.push_back(targets[row]);
      train_sum += targets[row];
      if (categorical) {
        train_codes.push_back(col.codes[row]);
        seen[col.codes[row]] = 1;
      } else {
        train_values.push_back(col.numeric[row]);
      }
    }
    if (train_targets.empty())
      raise(Errc::DegenerateFolds,
            "fold " + std::to_string(t) + " has an empty complement");
    const double fallback =
        train_sum / static_cast<double>(train_targets.size());

    std::optional<SplitCandidate> split;
    if (categorical) {
      split = best_categorical_split(train_codes, train_targets,
                                     col.cardinality(), min_samples_leaf);
    } else {
      split =
          best_numeric_split(train_values, train_targets, min_samples_leaf);
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (folds.fold_of[i] != t) continue;
      const auto row = rows[i];
      double pred = fallback;
      if (categorical) {
        const auto code = col.codes[row];
        if (seen[code] && split) {
          pred = split->rule.routes_left_code(code) ? split->left_mean
                                                    : split->right_mean;
        }
      } else if (split) {
        pred = split->rule.routes_left_numeric(col.numeric[row])
                   ? split->left_mean
                   : split->right_mean;
      }
      const double held_out = (targets[row] - pred) * (targets[row] - pred);
      const double in_sample =
          (targets[row] - node_mean) * (targets[row] - node_mean);
      const double diff = held_out - in_sample;
      rank += held_out;
      diff_sum += diff;
      diff_sq += diff * diff;
    }
  }
  CvRank out;
  out.rank = rank;
  if (n > 1) {
    const double var =
        (diff_sq - diff_sum * diff_sum / static_cast<double>(n)) /
        static_cast<double>(n - 1);
    out.se = std::sqrt(std::max(0.0, var) * static_cast<double>(n));
  }
  return out;
}

// The rank-versus-impurity comparison stops the branch only when the winning
// feature fails to beat the node SSE by this many standard errors of the
// held-out estimate. Without the error bar, sampling noise in the rank lets
// roughly one node in seven split on pure noise at n = 6000, which would put
// visible importance mass on uninformative features.
constexpr double kCvStopSlackStdErrs = 3.0;

}  // namespace

double cv_rank_feature(const Dataset& data, std::span<const double> targets,
                       std::span<const std::uint32_t> rows, int feature_idx,
                       const FoldAssignment& folds,
                       std::size_t min_samples_leaf) {
  return cv_rank_with_se(data, targets, rows, feature_idx, folds,
                         min_samples_leaf)
      .rank;
}

std::optional<SplitCandidate> select_split_cv(
    const Dataset& data, std::span<const double> targets,
    std::span<const std::uint32_t> rows, const GrowthParams& params,
    std::size_t node_id) {
  const auto folds = assign_folds(rows.size(), params.cv_folds, params.seed,
                                  params.tree_idx, node_id);
  int best_feature = -1;
  CvRank best;
  best.rank = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    const auto ranked = cv_rank_with_se(data, targets, rows,
                                        static_cast<int>(j), folds,
                                        params.min_samples_leaf);
    if (ranked.rank < best.rank) {
      best = ranked;
      best_feature = static_cast<int>(j);
    }
  }
  if (best_feature < 0) return std::nullopt;

  std::vector<double> node_targets;
  gather_targets(targets, rows, node_targets);
  if (!(best.rank < node_sse(node_targets) - kCvStopSlackStdErrs * best.se))
    return std::nullopt;

  NodeScratch scratch;
  return best_split_for_feature(data, targets, rows, best_feature,
                                params.min_samples_leaf, scratch);
}

namespace {

bool rule_routes_left(const SplitRule& rule, const Dataset& data,
                      std::uint32_t row) {
  const auto& col = data.features[rule.feature];
  if (rule.is_categorical) return rule.routes_left_code(col.codes[row]);
  return rule.routes_left_numeric(col.numeric[row]);
}

struct Grower {
  const Dataset& data;
  std::span<const double> targets;
  const GrowthParams& params;
  Tree& tree;

  std::size_t build(std::vector<std::uint32_t>& rows, std::size_t depth) {
    const std::size_t id = tree.nodes.size();
    tree.nodes.emplace_back();
    {
      auto& node = tree.nodes.back();
      node.node_id = id;
      node.count = rows.size();
      double s = 0.0;
      for (auto i : rows) s += targets[i];
      node.value = s / static_cast<double>(rows.size());
    }

    if (depth >= params.max_depth || rows.size() < params.min_samples_split)
      return id;

    std::optional<SplitCandidate> cand;
    if (params.selector == SplitSelector::TrainGain) {
      cand = best_split_train(data, targets, rows, params);
    } else {
      cand = select_split_cv(data, targets, rows, params, id);
    }
    if (!cand) return id;

    std::vector<std::uint32_t> left_rows, right_rows;
    left_rows.reserve(cand->left_count);
    right_rows.reserve(cand->right_count);
    for (auto i : rows) {
      (rule_routes_left(cand->rule, data, i) ? left_rows : right_rows)
          .push_back(i);
    }
    if (left_rows.size() < params.min_samples_leaf ||
        right_rows.size() < params.min_samples_leaf) {
      return id;  // candidate cannot satisfy the leaf floor
    }

    rows.clear();
    rows.shrink_to_fit();

    const bool heavier_left = left_rows.size() >= right_rows.size();
    {
      auto& node = tree.nodes[id];
      node.is_leaf = false;
      node.rule = std::move(cand->rule);
      node.gain = std::max(0.0, cand->gain);
      node.cover = left_rows.size() + right_rows.size();
      node.unseen_goes_left = heavier_left;
    }
    const std::size_t left_id = build(left_rows, depth + 1);
    tree.nodes[id].left = static_cast<int>(left_id);
    const std::size_t right_id = build(right_rows, depth + 1);
    tree.nodes[id].right = static_cast<int>(right_id);
    return id;
  }
};

}  // namespace

Tree grow_tree(const Dataset& data, std::span<const double> targets,
               const GrowthParams& params) {
  if (targets.empty()) raise(Errc::EmptyNode, "cannot grow a tree on 0 rows");
  if (params.selector == SplitSelector::CrossValidated &&
      params.min_samples_split < 2 * params.cv_folds) {
    raise(Errc::InvalidConfig,
          "cross-validated selection needs min_samples_split >= 2 * folds");
  }
  Tree tree;
  tree.n_features = data.n_features();
  tree.feature_cardinality.reserve(data.n_features());
  for (const auto& col : data.features) {
    tree.feature_cardinality.push_back(
        col.kind == ColumnKind::Categorical ? col.cardinality() : 0);
  }
  std::vector<std::uint32_t> rows(data.n_rows());
  std::iota(rows.begin(), rows.end(), 0u);
  Grower grower{data, targets, params, tree};
  grower.build(rows, 0);
  return tree;
}

namespace {

double fetch_numeric(const Dataset& data, const ColumnOverride& ov, int j,
                     std::size_t row) {
  if (ov.feature == j && ov.numeric) return ov.numeric[row];
  return data.features[j].numeric[row];
}

std::int32_t fetch_code(const Dataset& data, const ColumnOverride& ov, int j,
                        std::size_t row) {
  if (ov.feature == j && ov.codes) return ov.codes[row];
  return data.features[j].codes[row];
}

std::size_t descend(const Tree& tree, const Dataset& data, std::size_t row,
                    const ColumnOverride& ov) {
  std::size_t idx = 0;
  while (!tree.nodes[idx].is_leaf) {
    const auto& node = tree.nodes[idx];
    const int j = node.rule.feature;
    bool left;
    if (node.rule.is_categorical) {
      const auto code = fetch_code(data, ov, j, row);
      if (code < 0 || code >= tree.feature_cardinality[j]) {
        left = node.unseen_goes_left;
      } else {
        left = node.rule.routes_left_code(code);
      }
    } else {
      left = node.rule.routes_left_numeric(fetch_numeric(data, ov, j, row));
    }
    idx = static_cast<std::size_t>(left ? node.left : node.right);
  }
  return idx;
}

}  // namespace

double predict_tree(const Tree& tree, const Dataset& data, std::size_t row) {
  return predict_tree(tree, data, row, ColumnOverride{});
}

double predict_tree(const Tree& tree, const Dataset& data, std::size_t row,
                    const ColumnOverride& override_col) {
  if (data.n_features() != tree.n_features)
    raise(Errc::FeatureCountMismatch,
          "row has " + std::to_string(data.n_features()) +
              " features, tree expects " + std::to_string(tree.n_features));
  return tree.nodes[descend(tree, data, row, override_col)].value;
}

std::size_t route_to_leaf(const Tree& tree, const Dataset& data,
                          std::size_t row) {
  return descend(tree, data, row, ColumnOverride{});
}

}  // namespace cvboost
