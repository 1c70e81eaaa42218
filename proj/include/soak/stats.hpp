#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "soak/resampling.hpp"

namespace soak {

// Fraction of mismatches. Throws on length mismatch or empty input.
double error_rate(std::span<const int> predicted, std::span<const int> truth);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Student-t CDF with df degrees of freedom, via the incomplete beta.
double student_t_cdf(double x, int df);

struct TTestResult {
    double t_stat = 0.0;
    double p_value = 1.0;
    double mean_diff = 0.0;
    bool degenerate = false;  // sd == 0 convention applied
};

// Two-sided paired t-test on per-fold differences, df = K-1.
// sd == 0 convention: p = 1 if the mean is 0, else p = 0.
// Throws std::invalid_argument with fewer than 2 differences.
TTestResult paired_ttest(std::span<const double> diffs);

// One test error measurement: (learner, split) -> error on the test cell.
struct EvalRecord {
    std::string dataset;
    std::string learner;
    std::string subset;   // test subset name
    int fold = 0;         // test fold, 1..k
    TrainPolicy policy = TrainPolicy::Same;
    double test_error = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double fit_seconds = 0.0;  // observability only, excluded from equality
};

enum class ComparisonKind { OtherVsSame, AllVsSame };
std::string_view to_string(ComparisonKind kind);

// Per test subset: mean (treatment - Same) error difference in percentage
// points over paired folds, with the paired t-test.
struct SubsetComparison {
    std::string dataset;
    std::string learner;
    std::string subset;
    ComparisonKind kind = ComparisonKind::OtherVsSame;
    double mean_diff = 0.0;  // percentage points
    double t_stat = 0.0;
    double p_value = 1.0;
    int k_used = 0;  // paired folds
};

struct CompareResult {
    std::vector<SubsetComparison> comparisons;
    std::vector<std::string> notices;  // skipped comparisons and why
};

// Pairs Same records with Other/All records fold-by-fold per subset.
// Records must come from a single (dataset, learner).
CompareResult soak_compare(const std::vector<EvalRecord>& records);

// log10(p) with p clamped below at 1e-300, so extreme significance stays
// finite in tables and plots.
double log10_clamped(double p);

// Min/max over subsets of one dataset's comparisons of a single kind.
struct DatasetSummary {
    std::string dataset;
    std::string learner;
    ComparisonKind kind = ComparisonKind::OtherVsSame;
    double min_diff = 0.0;
    double max_diff = 0.0;
    double min_log10p = 0.0;
    double max_log10p = 0.0;
    std::string category;  // "similar" or "different"
};

DatasetSummary summarize_dataset(const std::vector<SubsetComparison>& comparisons);

// Mean and sample SD (divisor K-1) of test error over folds, per
// (dataset, learner, subset, policy).
struct ErrorStats {
    std::string dataset;
    std::string learner;
    std::string subset;
    TrainPolicy policy = TrainPolicy::Same;
    int folds = 0;
    double mean_error = 0.0;
    double sd_error = 0.0;  // 0 when folds < 2
};

std::vector<ErrorStats> error_stat_table(const std::vector<EvalRecord>& records);

}  // namespace soak
