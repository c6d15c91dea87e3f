#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvboost/boosting.hpp"

namespace cvboost {

enum class MeasureKind { Gain, SplitCount, Cover, Pfi };
enum class EvalSet { Train, Test };

struct ImportanceReport {
  MeasureKind measure = MeasureKind::Gain;
  std::vector<double> raw;     // clipped at zero for PFI
  std::vector<double> scaled;  // raw / sum(raw), or all zeros
  // PFI metadata; empty/default for the structural measures.
  std::size_t n_permutations = 0;
  std::optional<EvalSet> evaluation_set;
  std::optional<Metric> metric;
  std::vector<double> std_dev;     // per-feature std across permutations
  std::vector<double> raw_signed;  // pre-clip per-feature means
};

// raw / sum(raw); all-zero input maps to all-zero output. Entries must be
// non-negative (NegativeInput).
std::vector<double> scale_importance(std::span<const double> raw);

// Mean over fitted trees of the per-tree summed split gains per feature.
ImportanceReport gain_importance(const Ensemble& model);
// Total number of internal nodes splitting on each feature.
ImportanceReport split_count_importance(const Ensemble& model);
// Total cover (training rows through the node) per splitting feature.
ImportanceReport cover_importance(const Ensemble& model);

// Permutation FI: error increase after shuffling one column, averaged over
// n_permutations seeded shuffles per feature; negatives are clipped to zero
// before scaling (the signed means stay in raw_signed). The (feature,
// permutation) grid runs in parallel over `jobs` threads with identical
// results for any job count.
ImportanceReport permutation_importance(const Ensemble& model,
                                        const Dataset& data,
                                        std::size_t n_permutations,
                                        Metric metric, std::uint64_t seed,
                                        EvalSet evaluation_set,
                                        int jobs = 1);

const char* measure_name(MeasureKind measure);
const char* eval_set_name(EvalSet set);

// Report serialisation used by the CLI: CSV columns
// measure,feature,raw,scaled,std,evaluation_set (std and evaluation_set
// empty for structural measures) and an equivalent JSON object.
std::string report_to_csv(const ImportanceReport& report,
                          const std::vector<std::string>& feature_names);
std::string report_to_json(const ImportanceReport& report,
                           const std::vector<std::string>& feature_names);

}  // namespace cvboost
