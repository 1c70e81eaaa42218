#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "soak/matrix.hpp"
#include "soak/resampling.hpp"

namespace soak {

enum class LearnerKind { Featureless, Knn, L1Logistic };

std::string_view to_string(LearnerKind kind);
std::optional<LearnerKind> parse_learner(std::string_view text);

struct LearnerSpec {
    LearnerKind kind = LearnerKind::Featureless;
    std::vector<int> knn_grid;       // empty means 1..20
    int internal_folds = 10;         // internal CV folds for tuning
    int path_length = 50;            // lambda path length
    double lambda_min_ratio = 1e-3;  // last lambda = lambda_max * ratio
    std::uint64_t seed = 0;
};

// Column-wise zero mean / unit variance transform, fit on training rows
// only. Population SD. Constant columns get scale 0 and map to 0, so they
// can never carry weight.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    void fit(const RowView& view);
    void apply(const double* raw, double* out) const;
    Matrix transform(const RowView& view) const;
    Matrix transform(const Matrix& raw) const;
};

// Everything needed to predict, plus the chosen hyper-parameter record.
// Prediction is a pure function of this struct and the query features.
struct FittedModel {
    LearnerKind kind = LearnerKind::Featureless;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;

    // featureless
    int majority_class = 0;

    // knn
    int chosen_k = 0;
    Matrix train_x;  // standardized training features
    std::vector<int> train_y;

    // l1 logistic (weights live on the standardized scale)
    Matrix weights;                  // C x P
    std::vector<double> intercepts;  // C
    double chosen_lambda = 0.0;
    double lambda_max = 0.0;
    std::vector<double> lambda_path;    // full grid used for tuning
    std::vector<double> cv_mean_error;  // internal CV curve along the path

    Standardizer standardizer;
    std::vector<std::string> warnings;
    double fit_seconds = 0.0;

    std::string to_json() const;
};

FittedModel fit_featureless(const RowView& train);
FittedModel fit_knn(const RowView& train, const LearnerSpec& spec);
FittedModel fit_l1_logistic(const RowView& train, const LearnerSpec& spec);

// Dispatch on spec.kind; records wall time in fit_seconds.
FittedModel fit(const RowView& train, const LearnerSpec& spec);

std::vector<int> predict(const FittedModel& model, const Matrix& raw_features);
std::vector<int> predict(const FittedModel& model, const RowView& view);

// Class-stratified fold ids in 1..folds for the positions of a train view.
// Used by the tuning loops; subsets are invisible here by construction.
std::vector<int> internal_cv_folds(std::size_t n, const std::vector<int>& labels,
                                   std::size_t n_classes, int folds, std::uint64_t seed);

}  // namespace soak
