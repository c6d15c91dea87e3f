#include <doctest.h>

#include <cmath>
#include <set>

#include "cvboost/rng.hpp"
#include "cvboost/tree.hpp"
#include "oracles.hpp"

using namespace cvboost;

namespace {

Dataset numeric_dataset(const std::vector<std::vector<double>>& columns,
                        std::vector<double> target) {
  Dataset data;
  data.target_name = "y";
  for (std::size_t j = 0; j < columns.size(); ++j) {
    FeatureColumn col;
    col.name = "x" + std::to_string(j);
    col.kind = ColumnKind::Numeric;
    col.numeric = columns[j];
    data.features.push_back(std::move(col));
  }
  data.target = std::move(target);
  return data;
}

Dataset categorical_dataset(const std::vector<std::int32_t>& codes,
                            std::int32_t cardinality,
                            std::vector<double> target) {
  Dataset data;
  data.target_name = "y";
  FeatureColumn col;
  col.name = "c";
  col.kind = ColumnKind::Categorical;
  col.codes = codes;
  for (std::int32_t k = 0; k < cardinality; ++k)
    col.dictionary.push_back(std::to_string(k));
  data.features.push_back(std::move(col));
  data.target = std::move(target);
  return data;
}

std::vector<std::uint32_t> all_rows(const Dataset& data) {
  std::vector<std::uint32_t> rows(data.n_rows());
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = static_cast<std::uint32_t>(i);
  return rows;
}

}  // namespace

TEST_CASE("node_sse") {
  CHECK(node_sse(std::vector<double>{5, 5, 5}) == 0.0);
  CHECK(node_sse(std::vector<double>{0, 0, 1, 1}) == 1.0);
  // mean 0.4: 3 * 0.16 + 2 * 0.36 = 1.2
  CHECK(node_sse(std::vector<double>{0, 0, 1, 0, 1}) ==
        doctest::Approx(1.2).epsilon(1e-12));
  CHECK_THROWS_AS(node_sse(std::vector<double>{}), Error);
}

TEST_CASE("best_numeric_split on a perfectly separable column") {
  const std::vector<double> x{1, 2, 3, 4}, y{0, 0, 1, 1};
  const auto cand = best_numeric_split(x, y);
  REQUIRE(cand.has_value());
  CHECK(cand->rule.threshold == 2.5);
  CHECK(cand->gain == 1.0);
  CHECK(cand->left_count == 2);
  CHECK(cand->right_count == 2);
  CHECK(cand->left_mean == 0.0);
  CHECK(cand->right_mean == 1.0);
}

TEST_CASE("best_numeric_split returns nothing for a constant column") {
  CHECK_FALSE(best_numeric_split(std::vector<double>{7, 7, 7},
                                 std::vector<double>{0, 1, 0})
                  .has_value());
}

TEST_CASE("best_numeric_split with a single candidate threshold") {
  // Only cut is at 1.5: parent SSE 2/3, children SSE 1/2 + 0 -> gain 1/6.
  const auto cand =
      best_numeric_split(std::vector<double>{1, 1, 2}, std::vector<double>{0, 1, 1});
  REQUIRE(cand.has_value());
  CHECK(cand->rule.threshold == 1.5);
  CHECK(cand->gain == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const auto ref = oracle::best_numeric({1, 1, 2}, {0, 1, 1});
  CHECK(cand->gain == ref->gain);
}

TEST_CASE("best_numeric_split tie-breaks toward the smallest threshold") {
  // Cuts at 1.5 and 3.5 both gain 1/3; 2.5 gains 0.
  const auto cand =
      best_numeric_split(std::vector<double>{1, 2, 3, 4}, std::vector<double>{0, 1, 1, 0});
  REQUIRE(cand.has_value());
  CHECK(cand->rule.threshold == 1.5);
}

TEST_CASE("best_numeric_split honours min_samples_leaf") {
  const std::vector<double> x{1, 2, 3, 4}, y{0, 0, 0, 1};
  const auto free_cand = best_numeric_split(x, y, 1);
  REQUIRE(free_cand.has_value());
  CHECK(free_cand->rule.threshold == 3.5);
  const auto constrained = best_numeric_split(x, y, 2);
  REQUIRE(constrained.has_value());
  CHECK(constrained->rule.threshold == 2.5);
  CHECK_FALSE(best_numeric_split(x, y, 3).has_value());
}

TEST_CASE("best_numeric_split matches the exhaustive oracle exactly") {
  Rng rng(20240601);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(39);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // small value grid so duplicate values are common
      x[i] = static_cast<double>(rng.below(8)) * 0.5;
      y[i] = rng.uniform01();
    }
    const std::size_t msl = 1 + rng.below(3);
    const auto mine = best_numeric_split(x, y, msl);
    const auto ref = oracle::best_numeric(x, y, msl);
    REQUIRE(mine.has_value() == ref.has_value());
    if (mine) {
      CHECK(mine->gain == ref->gain);
      CHECK(mine->rule.threshold == ref->threshold);
      CHECK(mine->left_count == ref->left_count);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("best_categorical_split orders categories by mean response") {
  // a: {0,0}, b: {1}, c: {0,1}; best bipartition is {a} with gain 8/15.
  const std::vector<std::int32_t> codes{0, 0, 1, 2, 2};
  const std::vector<double> y{0, 0, 1, 0, 1};
  const auto cand = best_categorical_split(codes, y, 3);
  REQUIRE(cand.has_value());
  CHECK(cand->rule.left_codes == std::vector<std::int32_t>{0});
  CHECK(cand->gain == doctest::Approx(8.0 / 15.0).epsilon(1e-12));
  const auto ref = oracle::best_categorical(codes, y);
  CHECK(cand->gain == ref->gain);
}

TEST_CASE("best_categorical_split needs two present categories") {
  CHECK_FALSE(best_categorical_split(std::vector<std::int32_t>{4, 4, 4},
                                     std::vector<double>{0, 1, 0}, 10)
                  .has_value());
}

TEST_CASE("best_categorical_split returns a zero-gain cut for equal means") {
  const auto cand = best_categorical_split(std::vector<std::int32_t>{0, 0, 1, 1},
                                           std::vector<double>{0, 1, 0, 1}, 2);
  REQUIRE(cand.has_value());
  CHECK(cand->gain == 0.0);
  CHECK(cand->rule.left_codes.size() == 1);
}

TEST_CASE("best_categorical_split tie-breaks toward the shortest prefix") {
  // means 0,1,2: prefixes {0} and {0,1} both gain 1.5
  const auto cand = best_categorical_split(std::vector<std::int32_t>{0, 1, 2},
                                           std::vector<double>{0, 1, 2}, 3);
  REQUIRE(cand.has_value());
  CHECK(cand->rule.left_codes == std::vector<std::int32_t>{0});
  CHECK(cand->gain == 1.5);
}

TEST_CASE("best_categorical_split matches brute force over all bipartitions") {
  Rng rng(977);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::int32_t k = 2 + static_cast<std::int32_t>(rng.below(7));
    const std::size_t n = 2 + rng.below(39);
    std::vector<std::int32_t> codes(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      codes[i] = static_cast<std::int32_t>(rng.below(k));
      y[i] = rng.uniform01();
    }
    const auto mine = best_categorical_split(codes, y, k);
    const auto ref = oracle::best_categorical(codes, y);
    REQUIRE(mine.has_value() == ref.has_value());
    if (mine) {
      CHECK(mine->gain == ref->gain);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("best_split_train picks the only informative feature") {
  const auto data = numeric_dataset({{3, 3, 3, 3}, {1, 2, 3, 4}}, {0, 0, 1, 1});
  GrowthParams params;
  const auto cand = best_split_train(data, data.target, all_rows(data), params);
  REQUIRE(cand.has_value());
  CHECK(cand->rule.feature == 1);
}

TEST_CASE("best_split_train tie-breaks by feature index") {
  const auto data = numeric_dataset({{1, 2, 3, 4}, {1, 2, 3, 4}}, {0, 0, 1, 1});
  GrowthParams params;
  const auto cand = best_split_train(data, data.target, all_rows(data), params);
  REQUIRE(cand.has_value());
  CHECK(cand->rule.feature == 0);
}

TEST_CASE("best_split_train returns nothing on a pure node") {
  const auto data = numeric_dataset({{1, 2, 3, 4}}, {5, 5, 5, 5});
  GrowthParams params;
  CHECK_FALSE(
      best_split_train(data, data.target, all_rows(data), params).has_value());
}

TEST_CASE("cv_rank_feature falls back to the no-split predictor") {
  const auto data = numeric_dataset({{2, 2, 2, 2, 2, 2}}, {0, 1, 0, 1, 1, 0});
  const auto folds = assign_folds(6, 3, 5, 0, 0);
  const double rank =
      cv_rank_feature(data, data.target, all_rows(data), 0, folds);
  const double ref = oracle::cv_rank_numeric(data.features[0].numeric,
                                             data.target, folds.fold_of, 3);
  CHECK(rank == doctest::Approx(ref).epsilon(1e-12));
  CHECK(rank > 0.0);
}

TEST_CASE("cv_rank_feature is zero for a perfectly predictive feature") {
  // Codes alternate so T=3 folds of size 4 always leave both codes in the
  // training part.
  std::vector<std::int32_t> codes;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    codes.push_back(i % 2);
    y.push_back(i % 2);
  }
  const auto data = categorical_dataset(codes, 2, y);
  const auto folds = assign_folds(12, 3, 7, 0, 0);
  CHECK(cv_rank_feature(data, data.target, all_rows(data), 0, folds) == 0.0);
}

TEST_CASE("cv_rank_feature matches the fold-by-fold oracle on numeric data") {
  Rng rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(12), y(12);
    for (int i = 0; i < 12; ++i) {
      x[i] = rng.uniform01();
      y[i] = rng.uniform01();
    }
    const auto data = numeric_dataset({x}, y);
    const auto folds = assign_folds(12, 4, 1000 + trial, 2, 3);
    const double mine =
        cv_rank_feature(data, data.target, all_rows(data), 0, folds);
    const double ref = oracle::cv_rank_numeric(x, y, folds.fold_of, 4);
    CHECK(mine == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("cv_rank_feature matches the oracle on sparse categorical data") {
  Rng rng(505);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::int32_t> codes(14);
    std::vector<double> y(14);
    for (int i = 0; i < 14; ++i) {
      codes[i] = static_cast<std::int32_t>(rng.below(9));  // unseen-in-fold likely
      y[i] = rng.uniform01();
    }
    const auto data = categorical_dataset(codes, 9, y);
    const auto folds = assign_folds(14, 5, 2000 + trial, 1, 8);
    const double mine =
        cv_rank_feature(data, data.target, all_rows(data), 0, folds);
    const double ref = oracle::cv_rank_categorical(codes, y, folds.fold_of, 5);
    CHECK(mine == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("cv_rank_feature rejects degenerate folds") {
  const auto data = numeric_dataset({{1, 2, 3}}, {0, 1, 0});
  FoldAssignment degenerate;
  degenerate.fold_of = {0, 0, 0};
  degenerate.n_folds = 1;
  CHECK_THROWS_AS(
      cv_rank_feature(data, data.target, all_rows(data), 0, degenerate), Error);
}

TEST_CASE("select_split_cv picks a zero-rank feature and is deterministic") {
  std::vector<std::int32_t> codes;
  std::vector<double> x, y;
  Rng rng(31);
  for (int i = 0; i < 24; ++i) {
    codes.push_back(i % 2);
    x.push_back(rng.uniform01());
    y.push_back(i % 2);
  }
  Dataset data = categorical_dataset(codes, 2, y);
  FeatureColumn noise;
  noise.name = "x1";
  noise.kind = ColumnKind::Numeric;
  noise.numeric = x;
  data.features.push_back(std::move(noise));

  GrowthParams params;
  params.selector = SplitSelector::CrossValidated;
  params.cv_folds = 4;
  params.min_samples_split = 8;
  params.seed = 99;
  params.tree_idx = 1;
  const auto a = select_split_cv(data, data.target, all_rows(data), params, 0);
  const auto b = select_split_cv(data, data.target, all_rows(data), params, 0);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->rule.feature == 0);
  CHECK(a->rule.feature == b->rule.feature);
  CHECK(a->gain == b->gain);
  CHECK(a->rule.left_codes == b->rule.left_codes);
}

TEST_CASE("select_split_cv prefers signal over high-cardinality noise") {
  // One 100-category noise feature against a 2-category feature carrying a
  // power-case signal (alpha = 0.2); selection frequency must exceed 0.9.
  int picked_signal = 0;
  int decided = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(9000 + seed);
    const int n = 600;
    std::vector<std::int32_t> noise(n), signal(n);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      noise[i] = static_cast<std::int32_t>(rng.below(100));
      signal[i] = static_cast<std::int32_t>(rng.below(2));
      const double p = signal[i] == 0 ? 0.7 : 0.3;
      y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    Dataset data = categorical_dataset(noise, 100, y);
    FeatureColumn sig;
    sig.name = "s";
    sig.kind = ColumnKind::Categorical;
    sig.codes = signal;
    sig.dictionary = {"0", "1"};
    data.features.push_back(std::move(sig));

    GrowthParams params;
    params.selector = SplitSelector::CrossValidated;
    params.cv_folds = 5;
    params.min_samples_split = 10;
    params.seed = seed;
    params.tree_idx = 1;
    const auto cand =
        select_split_cv(data, data.target, all_rows(data), params, 0);
    if (cand) {
      ++decided;
      if (cand->rule.feature == 1) ++picked_signal;
    }
  }
  CHECK(decided >= 45);
  CHECK(picked_signal > 45);  // > 0.9 of 50
}

TEST_CASE("select_split_cv stops on uninformative nodes") {
  int stopped = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(777 + seed);
    const int n = 2000;
    std::vector<double> x0(n);
    std::vector<std::int32_t> c1(n), c2(n);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      x0[i] = rng.normal();
      c1[i] = static_cast<std::int32_t>(rng.below(10));
      c2[i] = static_cast<std::int32_t>(rng.below(100));
      y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    Dataset data = numeric_dataset({x0}, y);
    FeatureColumn f1, f2;
    f1.name = "c1";
    f1.kind = ColumnKind::Categorical;
    f1.codes = c1;
    for (int k = 0; k < 10; ++k) f1.dictionary.push_back(std::to_string(k));
    f2.name = "c2";
    f2.kind = ColumnKind::Categorical;
    f2.codes = c2;
    for (int k = 0; k < 100; ++k) f2.dictionary.push_back(std::to_string(k));
    data.features.push_back(std::move(f1));
    data.features.push_back(std::move(f2));

    GrowthParams params;
    params.selector = SplitSelector::CrossValidated;
    params.cv_folds = 5;
    params.min_samples_split = 10;
    params.seed = seed;
    params.tree_idx = 1;
    if (!select_split_cv(data, data.target, all_rows(data), params, 0))
      ++stopped;
  }
  CHECK(stopped >= 8);
}

TEST_CASE("grow_tree collapses constant targets to a stub") {
  const auto data = numeric_dataset({{1, 2, 3, 4}}, {5, 5, 5, 5});
  GrowthParams params;
  const auto tree = grow_tree(data, data.target, params);
  CHECK(tree.is_stub());
  CHECK(tree.root().value == 5.0);
  CHECK(tree.root().count == 4);
}

TEST_CASE("grow_tree respects max_depth") {
  const auto data = numeric_dataset({{1, 2, 3, 4}}, {0, 0, 1, 1});
  GrowthParams params;
  params.max_depth = 1;
  const auto tree = grow_tree(data, data.target, params);
  REQUIRE(tree.nodes.size() == 3);
  CHECK_FALSE(tree.root().is_leaf);
  CHECK(tree.nodes[tree.root().left].is_leaf);
  CHECK(tree.nodes[tree.root().right].is_leaf);
}

namespace {

void check_tree_structure(const Tree& tree, const Dataset& data,
                          const GrowthParams& params) {
  // depth bound, leaf sizes, cover additivity, non-negative gains
  std::function<std::size_t(int, std::size_t)> walk =
      [&](int idx, std::size_t depth) -> std::size_t {
    const auto& node = tree.nodes[idx];
    if (node.is_leaf) {
      CHECK(depth <= params.max_depth);
      CHECK(node.count >= params.min_samples_leaf);
      return node.count;
    }
    CHECK(node.gain >= 0.0);
    const auto left_cover = walk(node.left, depth + 1);
    const auto right_cover = walk(node.right, depth + 1);
    CHECK(node.cover == left_cover + right_cover);
    return node.cover;
  };
  CHECK(walk(0, 0) == data.n_rows());
}

double tree_gain_total(const Tree& tree) {
  double total = 0.0;
  for (const auto& node : tree.nodes)
    if (!node.is_leaf) total += node.gain;
  return total;
}

double tree_leaf_sse(const Tree& tree, const Dataset& data) {
  // gather targets by routed leaf, then SSE per leaf
  std::vector<std::vector<double>> leaf_targets(tree.nodes.size());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    leaf_targets[route_to_leaf(tree, data, i)].push_back(data.target[i]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < leaf_targets.size(); ++k) {
    if (!leaf_targets[k].empty()) total += oracle::sse(leaf_targets[k]);
  }
  return total;
}

Dataset random_mixed_dataset(Rng& rng, std::size_t n) {
  std::vector<double> x(n), y(n);
  std::vector<std::int32_t> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform01();
    c[i] = static_cast<std::int32_t>(rng.below(5));
    y[i] = rng.uniform01() + 0.3 * c[i];
  }
  Dataset data = numeric_dataset({x}, y);
  FeatureColumn col;
  col.name = "c";
  col.kind = ColumnKind::Categorical;
  col.codes = c;
  col.dictionary = {"0", "1", "2", "3", "4"};
  data.features.push_back(std::move(col));
  return data;
}

}  // namespace

TEST_CASE("grow_tree structural properties on random data") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = random_mixed_dataset(rng, 100);
    GrowthParams params;
    params.max_depth = 3;
    params.min_samples_leaf = 5;
    params.min_samples_split = 10;
    const auto tree = grow_tree(data, data.target, params);
    check_tree_structure(tree, data, params);

    // gain identity: root SSE - sum of leaf SSE == sum of internal gains
    const double root_sse = node_sse(data.target);
    const double identity = root_sse - tree_leaf_sse(tree, data);
    CHECK(tree_gain_total(tree) ==
          doctest::Approx(identity).epsilon(1e-6));
  }
}

TEST_CASE("grow_tree leaves predict the mean of their training rows") {
  Rng rng(9);
  const auto data = random_mixed_dataset(rng, 80);
  GrowthParams params;
  params.max_depth = 3;
  const auto tree = grow_tree(data, data.target, params);

  std::vector<std::vector<double>> leaf_targets(tree.nodes.size());
  for (std::size_t i = 0; i < data.n_rows(); ++i)
    leaf_targets[route_to_leaf(tree, data, i)].push_back(data.target[i]);
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const auto& node = tree.nodes[k];
    if (node.is_leaf) {
      REQUIRE(leaf_targets[k].size() == node.count);
      CHECK(node.value ==
            doctest::Approx(oracle::mean(leaf_targets[k])).epsilon(1e-12));
    } else {
      CHECK(leaf_targets[k].empty());
    }
  }
}

TEST_CASE("grow_tree with the CV selector is deterministic") {
  Rng rng(10);
  const auto data = random_mixed_dataset(rng, 60);
  GrowthParams params;
  params.selector = SplitSelector::CrossValidated;
  params.cv_folds = 3;
  params.min_samples_split = 6;
  params.seed = 12345;
  params.tree_idx = 4;
  const auto a = grow_tree(data, data.target, params);
  const auto b = grow_tree(data, data.target, params);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].is_leaf == b.nodes[i].is_leaf);
    CHECK(a.nodes[i].value == b.nodes[i].value);
    CHECK(a.nodes[i].rule.feature == b.nodes[i].rule.feature);
    CHECK(a.nodes[i].rule.threshold == b.nodes[i].rule.threshold);
    CHECK(a.nodes[i].gain == b.nodes[i].gain);
  }
}

TEST_CASE("predict_tree on a stub returns the constant") {
  const auto data = numeric_dataset({{1, 2, 3}}, {4, 4, 4});
  GrowthParams params;
  const auto tree = grow_tree(data, data.target, params);
  REQUIRE(tree.is_stub());
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(predict_tree(tree, data, i) == 4.0);
}

TEST_CASE("predict_tree routes unseen codes to the heavier child") {
  // left group (code 0) has 3 rows, right (code 1) has 2
  const auto data =
      categorical_dataset({0, 0, 0, 1, 1}, 2, {0, 0, 0, 1, 1});
  GrowthParams params;
  params.max_depth = 1;
  const auto tree = grow_tree(data, data.target, params);
  REQUIRE_FALSE(tree.is_stub());
  CHECK(tree.root().unseen_goes_left);

  Dataset probe = categorical_dataset({2}, 2, {0});  // sentinel code K = 2
  probe.features[0].dictionary = data.features[0].dictionary;
  CHECK(predict_tree(tree, probe, 0) == 0.0);
}

TEST_CASE("predict_tree rejects mismatched feature counts") {
  const auto data = numeric_dataset({{1, 2, 3, 4}}, {0, 0, 1, 1});
  GrowthParams params;
  const auto tree = grow_tree(data, data.target, params);
  const auto wide = numeric_dataset({{1}, {2}}, {0});
  CHECK_THROWS_AS(predict_tree(tree, wide, 0), Error);
}
