#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soak/dataset.hpp"

namespace soak {

// Per-row fold ids in 1..k. Stratified on (subset, class) when the dataset
// has no groups; group-preserving round-robin within each subset otherwise.
struct FoldAssignment {
    int k = 0;
    std::vector<int> folds;   // length N, values in 1..k
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

enum class TrainPolicy { Same, Other, All };

std::string_view to_string(TrainPolicy policy);
std::optional<TrainPolicy> parse_policy(std::string_view text);

// One train/test split: test rows are the (subset, fold) cell, train rows
// follow the policy. Row sets are kept in ascending order.
struct SplitSpec {
    int test_subset = 0;  // subset index
    int test_fold = 0;    // 1..k
    TrainPolicy policy = TrainPolicy::Same;
    std::vector<int> train_rows;
    std::vector<int> test_rows;
};

FoldAssignment assign_folds(const Dataset& dataset, int k, std::uint64_t seed);

// Builds the (subset, fold, policy) cell without filtering; test or train
// row sets may be empty (callers decide whether that means skip).
SplitSpec build_split(const Dataset& dataset, const FoldAssignment& fa,
                      int test_subset, int test_fold, TrainPolicy policy);

// All splits with non-empty train and test rows, ordered subset-major, then
// fold, then policy Same < Other < All. With a single subset only Same is
// emitted: the Other train set is empty and All would duplicate Same.
std::vector<SplitSpec> enumerate_splits(const Dataset& dataset, const FoldAssignment& fa,
                                        const std::vector<TrainPolicy>& policies);

// Features/labels restricted to a row set. Subset and group ids are not part
// of the feature matrix, so they can never leak into a learner.
struct RowView {
    const Dataset* data = nullptr;
    std::span<const int> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t n_features() const { return data->n_features(); }
    std::size_t n_classes() const { return data->n_classes(); }
    double x(std::size_t i, std::size_t j) const {
        return data->features(static_cast<std::size_t>(rows[i]), j);
    }
    const double* x_row(std::size_t i) const {
        return data->features.row(static_cast<std::size_t>(rows[i]));
    }
    int y(std::size_t i) const { return data->labels[static_cast<std::size_t>(rows[i])]; }
};

struct SplitViews {
    RowView train;
    RowView test;
};

// Throws std::runtime_error when either side is empty (a skipped job).
SplitViews resolve_split(const SplitSpec& split, const Dataset& dataset);

// Audit/replay: fold ids as CSV with header row_id,fold (row_id 0-based in
// load order, fold in 1..k).
void export_folds_csv(const FoldAssignment& fa, const std::string& path);
FoldAssignment import_folds_csv(const std::string& path, std::size_t expected_rows);

}  // namespace soak
