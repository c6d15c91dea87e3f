#pragma once

// Independent reference implementations used only by tests. Everything here
// favours obviousness over speed: exhaustive enumeration, two-pass means,
// no shared code with the library's search kernels.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sse(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

struct NumericSplit {
  double gain = 0.0;
  double threshold = 0.0;
  double left_mean = 0.0;
  double right_mean = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

// Scans every cut between consecutive distinct sorted values; rows are
// partitioned by value comparison in the original row order. Among
// equal-gain cuts the smallest threshold wins.
inline std::optional<NumericSplit> best_numeric(
    const std::vector<double>& values, const std::vector<double>& targets,
    std::size_t min_samples_leaf = 1) {
  std::vector<double> distinct(values);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 2) return std::nullopt;
  const double total = sse(targets);
  std::optional<NumericSplit> best;
  for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
    const double threshold = (distinct[k] + distinct[k + 1]) / 2.0;
    std::vector<double> left, right;
    for (std::size_t i = 0; i < values.size(); ++i) {
      (values[i] <= threshold ? left : right).push_back(targets[i]);
    }
    if (left.size() < min_samples_leaf || right.size() < min_samples_leaf)
      continue;
    const double gain = total - (sse(left) + sse(right));
    if (!best || gain > best->gain) {
      best = NumericSplit{gain,        threshold,    mean(left),
                          mean(right), left.size(),  right.size()};
    }
  }
  return best;
}

struct CategoricalSplit {
  double gain = 0.0;
  std::set<std::int32_t> left_codes;
  double left_mean = 0.0;
  double right_mean = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

// Enumerates every bipartition of the codes present at the node
// (2^(K'-1) - 1 of them, each seen twice via complements, which is
// harmless for a max).
inline std::optional<CategoricalSplit> best_categorical(
    const std::vector<std::int32_t>& codes, const std::vector<double>& targets,
    std::size_t min_samples_leaf = 1) {
  std::vector<std::int32_t> present(codes);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  const std::size_t k = present.size();
  if (k < 2) return std::nullopt;
  const double total = sse(targets);
  std::optional<CategoricalSplit> best;
  for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
    std::set<std::int32_t> left_codes;
    for (std::size_t b = 0; b < k; ++b) {
      if (mask & (1u << b)) left_codes.insert(present[b]);
    }
    std::vector<double> left, right;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      (left_codes.count(codes[i]) ? left : right).push_back(targets[i]);
    }
    if (left.size() < min_samples_leaf || right.size() < min_samples_leaf)
      continue;
    const double gain = total - (sse(left) + sse(right));
    if (!best || gain > best->gain) {
      best = CategoricalSplit{gain,       left_codes,   mean(left),
                              mean(right), left.size(), right.size()};
    }
  }
  return best;
}

// Fold-by-fold cross-validated rank of a single feature, spelled out step
// by step. `fold_of` assigns each local row to a fold. Numeric features
// route held-out rows by the fitted midpoint threshold; categorical rows
// whose code is absent from the fold's training part fall back to the
// training-part mean, as does the whole fold when no split exists.
inline double cv_rank_numeric(const std::vector<double>& values,
                              const std::vector<double>& targets,
                              const std::vector<std::uint32_t>& fold_of,
                              std::uint32_t n_folds,
                              std::size_t min_samples_leaf = 1) {
  double rank = 0.0;
  for (std::uint32_t t = 0; t < n_folds; ++t) {
    std::vector<double> train_x, train_y, test_x, test_y;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (fold_of[i] == t) {
        test_x.push_back(values[i]);
        test_y.push_back(targets[i]);
      } else {
        train_x.push_back(values[i]);
        train_y.push_back(targets[i]);
      }
    }
    const double fallback = mean(train_y);
    const auto split = best_numeric(train_x, train_y, min_samples_leaf);
    for (std::size_t i = 0; i < test_x.size(); ++i) {
      double pred = fallback;
      if (split) {
        pred = test_x[i] <= split->threshold ? split->left_mean
                                             : split->right_mean;
      }
      rank += (test_y[i] - pred) * (test_y[i] - pred);
    }
  }
  return rank;
}

inline double cv_rank_categorical(const std::vector<std::int32_t>& codes,
                                  const std::vector<double>& targets,
                                  const std::vector<std::uint32_t>& fold_of,
                                  std::uint32_t n_folds,
                                  std::size_t min_samples_leaf = 1) {
  double rank = 0.0;
  for (std::uint32_t t = 0; t < n_folds; ++t) {
    std::vector<std::int32_t> train_x, test_x;
    std::vector<double> train_y, test_y;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (fold_of[i] == t) {
        test_x.push_back(codes[i]);
        test_y.push_back(targets[i]);
      } else {
        train_x.push_back(codes[i]);
        train_y.push_back(targets[i]);
      }
    }
    const double fallback = mean(train_y);
    const std::set<std::int32_t> seen(train_x.begin(), train_x.end());
    const auto split = best_categorical(train_x, train_y, min_samples_leaf);
    for (std::size_t i = 0; i < test_x.size(); ++i) {
      double pred = fallback;
      if (seen.count(test_x[i]) == 0) {
        pred = fallback;
      } else if (split) {
        pred = split->left_codes.count(test_x[i]) ? split->left_mean
                                                  : split->right_mean;
      }
      rank += (test_y[i] - pred) * (test_y[i] - pred);
    }
  }
  return rank;
}

// Scalar minimiser by golden-section search.
inline double golden_section(const std::function<double(double)>& f,
                             double lo, double hi, double tol = 1e-10) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

// Central finite difference of f at x.
inline double central_difference(const std::function<double(double)>& f,
                                 double x, double step = 1e-5) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

// Pointwise losses the gradients are differentiated against. The squared
// error carries the 1/2 factor that makes its negative gradient the plain
// residual.
inline double pointwise_squared_error(double y, double raw) {
  return 0.5 * (y - raw) * (y - raw);
}

inline double pointwise_log_loss(double y, double raw) {
  // log(1 + exp(raw)) - y * raw, computed stably
  const double softplus =
      std::max(raw, 0.0) + std::log1p(std::exp(-std::abs(raw)));
  return softplus - y * raw;
}

}  // namespace oracle
