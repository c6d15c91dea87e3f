#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cvboost/dataset.hpp"

namespace cvboost {

// Binary regression tree in the CART mold: numeric threshold splits
// (value <= threshold goes left) and categorical subset splits
// (code in left_codes goes left).
struct SplitRule {
  int feature = -1;
  bool is_categorical = false;
  double threshold = 0.0;
  std::vector<std::int32_t> left_codes;  // sorted

  bool routes_left_numeric(double value) const { return value <= threshold; }
  bool routes_left_code(std::int32_t code) const {
    return std::binary_search(left_codes.begin(), left_codes.end(), code);
  }
};

struct SplitCandidate {
  SplitRule rule;
  double gain = 0.0;  // node SSE minus post-split impurity, >= 0
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  double left_mean = 0.0;
  double right_mean = 0.0;
};

struct TreeNode {
  std::size_t node_id = 0;
  bool is_leaf = true;
  // leaf payload
  double value = 0.0;
  std::size_t count = 0;
  // internal payload
  SplitRule rule;
  double gain = 0.0;
  std::size_t cover = 0;          // training rows reaching this node
  bool unseen_goes_left = false;  // true iff left_count >= right_count at fit
  int left = -1;                  // index into Tree::nodes
  int right = -1;
};

// Nodes stored in preorder; nodes[0] is the root and node_id equals the
// node's index.
struct Tree {
  std::vector<TreeNode> nodes;
  std::size_t n_features = 0;
  // Fit-time dictionary size per feature (0 for numeric): prediction treats
  // any code >= cardinality as unseen and routes it to the heavier child.
  std::vector<std::int32_t> feature_cardinality;

  bool is_stub() const { return nodes.size() == 1; }
  const TreeNode& root() const { return nodes.front(); }
};

enum class SplitSelector { TrainGain, CrossValidated };

struct GrowthParams {
  std::size_t max_depth = 3;
  std::size_t min_samples_split = 2;  // CrossValidated requires >= 2 * cv_folds
  std::size_t min_samples_leaf = 1;
  SplitSelector selector = SplitSelector::TrainGain;
  std::size_t cv_folds = 5;  // T
  std::uint64_t seed = 0;
  std::size_t tree_idx = 0;
};

// Sum of squared deviations from the mean; 0 for constant vectors.
double node_sse(std::span<const double> targets);

// Best threshold split over midpoints between consecutive distinct sorted
// values; ties broken toward the smallest threshold. nullopt when all values
// are equal or no cut satisfies min_samples_leaf. The returned gain is
// recomputed from the raw partition, not from scan arithmetic.
std::optional<SplitCandidate> best_numeric_split(
    std::span<const double> values, std::span<const double> targets,
    std::size_t min_samples_leaf = 1);

// Categories present at the node are ordered by mean target and the
// prefix cuts along that order are scored; ties broken toward the shortest
// prefix. nullopt when fewer than two categories are present.
std::optional<SplitCandidate> best_categorical_split(
    std::span<const std::int32_t> codes, std::span<const double> targets,
    std::int32_t n_codes, std::size_t min_samples_leaf = 1);

// Training-gain selection across all features: per-feature best candidates
// compared by gain, ties to the lower feature index; nullopt when no feature
// yields gain > 0.
std::optional<SplitCandidate> best_split_train(
    const Dataset& data, std::span<const double> targets,
    std::span<const std::uint32_t> rows, const GrowthParams& params);

// Cross-validated rank of one feature at a node: for each fold, the best
// split for the feature is fitted on the fold's complement and the held-out
// rows are scored by squared error against the fitted child means. Held-out
// rows whose category was unseen in the complement, and folds where the
// feature admits no valid split, fall back to the complement mean. The rank
// is the sum of held-out SSE over folds, so it is directly comparable to
// the node SSE.
double cv_rank_feature(const Dataset& data, std::span<const double> targets,
                       std::span<const std::uint32_t> rows, int feature_idx,
                       const FoldAssignment& folds,
                       std::size_t min_samples_leaf = 1);

// CVB selection: one fold assignment per node shared by all features; the
// lowest-rank feature wins (ties to the lower index). Returns nullopt unless
// the best rank undercuts the node SSE by more than three standard errors
// of the held-out estimate (the node becomes a leaf otherwise); the winning
// feature is then re-split on all node rows with the training-gain search.
std::optional<SplitCandidate> select_split_cv(
    const Dataset& data, std::span<const double> targets,
    std::span<const std::uint32_t> rows, const GrowthParams& params,
    std::size_t node_id);

// Recursive growth. A node becomes a leaf at max_depth, below
// min_samples_split, or when the selector returns nothing. Leaf values are
// raw target means; the boosting loop replaces them with loss-specific
// steps.
Tree grow_tree(const Dataset& data, std::span<const double> targets,
               const GrowthParams& params);

// Routes one dataset row through the tree. Codes >= the fit-time
// cardinality (the UNSEEN sentinel or anything out of dictionary) follow
// unseen_goes_left.
double predict_tree(const Tree& tree, const Dataset& data, std::size_t row);

// Same, with one column's values overridden (used by permutation
// importance). Exactly one of override_numeric / override_codes is set when
// override_feature >= 0.
struct ColumnOverride {
  int feature = -1;
  const double* numeric = nullptr;
  const std::int32_t* codes = nullptr;
};
double predict_tree(const Tree& tree, const Dataset& data, std::size_t row,
                    const ColumnOverride& override_col);

// Leaf index (into tree.nodes) a training row lands in.
std::size_t route_to_leaf(const Tree& tree, const Dataset& data,
                          std::size_t row);

}  // namespace cvboost
