#include "soak/learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "soak/kernels.hpp"
#include "soak/l1_logistic.hpp"
#include "soak/rng.hpp"

namespace soak {

std::string_view to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Featureless: return "featureless";
        case LearnerKind::Knn: return "knn";
        case LearnerKind::L1Logistic: return "l1_logistic";
    }
    return "?";
}

std::optional<LearnerKind> parse_learner(std::string_view text) {
    if (text == "featureless") return LearnerKind::Featureless;
    if (text == "knn") return LearnerKind::Knn;
    if (text == "l1_logistic") return LearnerKind::L1Logistic;
    return std::nullopt;
}

void Standardizer::fit(const RowView& view) {
    const std::size_t n = view.size();
    const std::size_t p = view.n_features();
    mean.assign(p, 0.0);
    scale.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = view.x_row(i);
        for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
    }
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = view.x_row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double dev = row[j] - mean[j];
            scale[j] += dev * dev;
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        const double sd = std::sqrt(scale[j] / static_cast<double>(n));
        // treat numerically-constant columns as constant
        scale[j] = sd <= 1e-12 * (std::fabs(mean[j]) + 1.0) ? 0.0 : sd;
    }
}

void Standardizer::apply(const double* raw, double* out) const {
    for (std::size_t j = 0; j < mean.size(); ++j) {
        out[j] = scale[j] == 0.0 ? 0.0 : (raw[j] - mean[j]) / scale[j];
    }
}

Matrix Standardizer::transform(const RowView& view) const {
    Matrix out(view.size(), mean.size());
    for (std::size_t i = 0; i < view.size(); ++i) apply(view.x_row(i), out.row(i));
    return out;
}

Matrix Standardizer::transform(const Matrix& raw) const {
    Matrix out(raw.rows(), mean.size());
    for (std::size_t i = 0; i < raw.rows(); ++i) apply(raw.row(i), out.row(i));
    return out;
}

std::vector<int> internal_cv_folds(std::size_t n, const std::vector<int>& labels,
                                   std::size_t n_classes, int folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("internal folds must be >= 2");
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(folds), n);
    std::vector<int> assignment(n, 0);
    std::size_t pos = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<int> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == static_cast<int>(c)) members.push_back(static_cast<int>(i));
        }
        if (members.empty()) continue;
        SplitMix64 rng(mix64(seed, c + 1));
        shuffle(members, rng);
        for (const int i : members) {
            assignment[static_cast<std::size_t>(i)] = static_cast<int>(pos % k) + 1;
            ++pos;
        }
    }
    return assignment;
}

namespace {

// argmax with ties to the smallest index
int argmax_class(const double* scores, std::size_t n_classes) {
    int best = 0;
    for (std::size_t c = 1; c < n_classes; ++c) {
        if (scores[c] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    return best;
}

int majority_vote(const std::vector<int>& votes, std::size_t n_classes) {
    std::vector<int> counts(n_classes, 0);
    for (const int v : votes) ++counts[static_cast<std::size_t>(v)];
    int best = 0;
    for (std::size_t c = 1; c < n_classes; ++c) {
        if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    return best;
}

std::vector<int> view_labels(const RowView& view) {
    std::vector<int> y(view.size());
    for (std::size_t i = 0; i < view.size(); ++i) y[i] = view.y(i);
    return y;
}

// Neighbor order for one query row: by distance, ties by train position.
std::vector<int> neighbor_order(const double* dists, std::size_t n_train) {
    std::vector<int> order(n_train);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [dists](int a, int b) {
        const double da = dists[static_cast<std::size_t>(a)];
        const double db = dists[static_cast<std::size_t>(b)];
        return da < db || (da == db && a < b);
    });
    return order;
}

std::vector<int> knn_predict_matrix(const Matrix& queries_std, const Matrix& train_x,
                                    const std::vector<int>& train_y, std::size_t n_classes,
                                    int k) {
    const std::size_t n_q = queries_std.rows();
    const std::size_t n_t = train_x.rows();
    const int kk = std::min<int>(k, static_cast<int>(n_t));
    Matrix dists(n_q, n_t);
    kernels::pairwise_sq_dists(queries_std.data(), n_q, train_x.data(), n_t,
                               train_x.cols(), dists.data());
    std::vector<int> out(n_q);
    for (std::size_t i = 0; i < n_q; ++i) {
        const std::vector<int> order = neighbor_order(dists.row(i), n_t);
        std::vector<int> votes(static_cast<std::size_t>(kk));
        for (int j = 0; j < kk; ++j) {
            votes[static_cast<std::size_t>(j)] = train_y[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        }
        out[i] = majority_vote(votes, n_classes);
    }
    return out;
}

}  // namespace

FittedModel fit_featureless(const RowView& train) {
    if (train.size() == 0) throw std::invalid_argument("featureless: empty training set");
    FittedModel model;
    model.kind = LearnerKind::Featureless;
    model.n_features = train.n_features();
    model.n_classes = train.n_classes();
    std::vector<std::size_t> counts(model.n_classes, 0);
    for (std::size_t i = 0; i < train.size(); ++i) ++counts[static_cast<std::size_t>(train.y(i))];
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;  // tie keeps the lowest index
    }
    model.majority_class = static_cast<int>(best);
    return model;
}

FittedModel fit_knn(const RowView& train, const LearnerSpec& spec) {
    if (train.size() < 2) throw std::invalid_argument("knn: need at least 2 training rows");

    FittedModel model;
    model.kind = LearnerKind::Knn;
    model.n_features = train.n_features();
    model.n_classes = train.n_classes();
    model.standardizer.fit(train);
    model.train_x = model.standardizer.transform(train);
    model.train_y = view_labels(train);

    const std::size_t n = train.size();
    const std::vector<int> folds =
        internal_cv_folds(n, model.train_y, model.n_classes, spec.internal_folds, spec.seed);
    const int n_folds = *std::max_element(folds.begin(), folds.end());

    // grid clipped to the smallest subtrain size
    std::vector<std::size_t> fold_sizes(static_cast<std::size_t>(n_folds) + 1, 0);
    for (const int f : folds) ++fold_sizes[static_cast<std::size_t>(f)];
    std::size_t min_subtrain = n;
    for (int f = 1; f <= n_folds; ++f) {
        min_subtrain = std::min(min_subtrain, n - fold_sizes[static_cast<std::size_t>(f)]);
    }

    std::vector<int> grid = spec.knn_grid;
    if (grid.empty()) {
        grid.resize(20);
        std::iota(grid.begin(), grid.end(), 1);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::erase_if(grid, [min_subtrain](int k) {
        return k < 1 || static_cast<std::size_t>(k) > min_subtrain;
    });

    if (n_folds < 2 || min_subtrain == 0 || grid.empty()) {
        model.warnings.push_back("knn: degenerate internal folds, falling back to k=1");
        model.chosen_k = 1;
        return model;
    }

    std::vector<double> error_sum(grid.size(), 0.0);
    int folds_used = 0;
    for (int f = 1; f <= n_folds; ++f) {
        std::vector<int> sub;
        std::vector<int> val;
        for (std::size_t i = 0; i < n; ++i) {
            (folds[i] == f ? val : sub).push_back(static_cast<int>(i));
        }
        if (sub.empty() || val.empty()) continue;
        ++folds_used;

        Matrix sub_x(sub.size(), model.train_x.cols());
        std::vector<int> sub_y(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) {
            std::copy_n(model.train_x.row(static_cast<std::size_t>(sub[i])), model.train_x.cols(),
                        sub_x.row(i));
            sub_y[i] = model.train_y[static_cast<std::size_t>(sub[i])];
        }

        Matrix dists(val.size(), sub.size());
        {
            Matrix val_x(val.size(), model.train_x.cols());
            for (std::size_t i = 0; i < val.size(); ++i) {
                std::copy_n(model.train_x.row(static_cast<std::size_t>(val[i])),
                            model.train_x.cols(), val_x.row(i));
            }
            kernels::pairwise_sq_dists(val_x.data(), val.size(), sub_x.data(), sub.size(),
                                       sub_x.cols(), dists.data());
        }

        std::vector<std::size_t> wrong(grid.size(), 0);
        for (std::size_t i = 0; i < val.size(); ++i) {
            const std::vector<int> order = neighbor_order(dists.row(i), sub.size());
            const int truth = model.train_y[static_cast<std::size_t>(val[i])];
            std::vector<int> votes;
            votes.reserve(static_cast<std::size_t>(grid.back()));
            std::size_t next = 0;
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                while (votes.size() < static_cast<std::size_t>(grid[gi]) && next < order.size()) {
                    votes.push_back(sub_y[static_cast<std::size_t>(order[next])]);
                    ++next;
                }
                if (majority_vote(votes, model.n_classes) != truth) ++wrong[gi];
            }
        }
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            error_sum[gi] += static_cast<double>(wrong[gi]) / static_cast<double>(val.size());
        }
    }

    if (folds_used == 0) {
        model.warnings.push_back("knn: degenerate internal folds, falling back to k=1");
        model.chosen_k = 1;
        return model;
    }

    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        if (error_sum[gi] < error_sum[best]) best = gi;  // tie keeps the smallest k
    }
    model.chosen_k = grid[best];
    return model;
}

FittedModel fit_l1_logistic(const RowView& train, const LearnerSpec& spec) {
    const std::size_t n = train.size();
    if (n < static_cast<std::size_t>(spec.internal_folds)) {
        throw std::invalid_argument("l1_logistic: train size below internal fold count");
    }
    std::vector<int> y = view_labels(train);
    {
        std::vector<bool> seen(train.n_classes(), false);
        std::size_t distinct = 0;
        for (const int label : y) {
            if (!seen[static_cast<std::size_t>(label)]) {
                seen[static_cast<std::size_t>(label)] = true;
                ++distinct;
            }
        }
        if (distinct < 2) throw std::invalid_argument("l1_logistic: need >= 2 classes in train");
    }

    FittedModel model;
    model.kind = LearnerKind::L1Logistic;
    model.n_features = train.n_features();
    model.n_classes = train.n_classes();
    model.standardizer.fit(train);

    const Matrix x_std = model.standardizer.transform(train);
    const l1::Problem prob{&x_std, &y, model.n_classes};

    model.lambda_max = l1::lambda_max(prob);
    model.lambda_path = l1::lambda_path(model.lambda_max, spec.path_length, spec.lambda_min_ratio);
    const std::size_t path_len = model.lambda_path.size();

    // Internal CV along the shared path; each fold standardizes its own
    // subtrain so no validation row leaks into the statistics.
    const std::vector<int> folds =
        internal_cv_folds(n, y, model.n_classes, spec.internal_folds, spec.seed);
    const int n_folds = *std::max_element(folds.begin(), folds.end());

    std::vector<double> error_sum(path_len, 0.0);
    int folds_used = 0;
    for (int f = 1; f <= n_folds; ++f) {
        std::vector<int> sub;
        std::vector<int> val;
        for (std::size_t i = 0; i < n; ++i) {
            (folds[i] == f ? val : sub).push_back(train.rows[i]);
        }
        if (sub.empty() || val.empty()) continue;

        const RowView sub_view{train.data, sub};
        const RowView val_view{train.data, val};
        Standardizer sub_std;
        sub_std.fit(sub_view);
        const Matrix sub_x = sub_std.transform(sub_view);
        std::vector<int> sub_y = view_labels(sub_view);
        const l1::Problem sub_prob{&sub_x, &sub_y, model.n_classes};

        const Matrix val_x = sub_std.transform(val_view);
        const std::vector<int> val_y = view_labels(val_view);

        Matrix w(model.n_classes, model.n_features);
        std::vector<double> b = l1::prior_intercepts(sub_prob);
        double step_hint = 1.0;
        Matrix logits(val_x.rows(), model.n_classes);
        for (std::size_t j = 0; j < path_len; ++j) {
            l1::solve(sub_prob, model.lambda_path[j], w, b, 1e-8, 10000, &step_hint);
            kernels::linear_forward(val_x.data(), val_x.rows(), val_x.cols(), w.data(), b.data(),
                                    model.n_classes, logits.data());
            std::size_t wrong = 0;
            for (std::size_t i = 0; i < val_x.rows(); ++i) {
                if (argmax_class(logits.row(i), model.n_classes) != val_y[i]) ++wrong;
            }
            error_sum[j] += static_cast<double>(wrong) / static_cast<double>(val_x.rows());
        }
        ++folds_used;
    }

    std::size_t best = 0;
    if (folds_used > 0) {
        model.cv_mean_error.resize(path_len);
        for (std::size_t j = 0; j < path_len; ++j) {
            model.cv_mean_error[j] = error_sum[j] / static_cast<double>(folds_used);
        }
        for (std::size_t j = 1; j < path_len; ++j) {
            // strict < keeps the larger lambda on ties
            if (model.cv_mean_error[j] < model.cv_mean_error[best]) best = j;
        }
    } else {
        model.warnings.push_back("l1_logistic: no usable internal folds, using lambda_max");
    }

    // Final fit on the full train view, walking the path down to the chosen
    // lambda with warm starts.
    Matrix w(model.n_classes, model.n_features);
    std::vector<double> b = l1::prior_intercepts(prob);
    double step_hint = 1.0;
    for (std::size_t j = 0; j <= best; ++j) {
        l1::solve(prob, model.lambda_path[j], w, b, 1e-8, 10000, &step_hint);
    }
    model.weights = std::move(w);
    model.intercepts = std::move(b);
    model.chosen_lambda = model.lambda_path[best];
    return model;
}

FittedModel fit(const RowView& train, const LearnerSpec& spec) {
    const auto started = std::chrono::steady_clock::now();
    FittedModel model;
    switch (spec.kind) {
        case LearnerKind::Featureless: model = fit_featureless(train); break;
        case LearnerKind::Knn: model = fit_knn(train, spec); break;
        case LearnerKind::L1Logistic: model = fit_l1_logistic(train, spec); break;
    }
    model.fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return model;
}

std::vector<int> predict(const FittedModel& model, const Matrix& raw_features) {
    if (raw_features.cols() != model.n_features) {
        throw std::invalid_argument("predict: feature width mismatch");
    }
    const std::size_t n = raw_features.rows();
    switch (model.kind) {
        case LearnerKind::Featureless:
            return std::vector<int>(n, model.majority_class);
        case LearnerKind::Knn: {
            const Matrix queries = model.standardizer.transform(raw_features);
            return knn_predict_matrix(queries, model.train_x, model.train_y, model.n_classes,
                                      model.chosen_k);
        }
        case LearnerKind::L1Logistic: {
            const Matrix x_std = model.standardizer.transform(raw_features);
            Matrix logits(n, model.n_classes);
            kernels::linear_forward(x_std.data(), n, x_std.cols(), model.weights.data(),
                                    model.intercepts.data(), model.n_classes, logits.data());
            std::vector<int> out(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = argmax_class(logits.row(i), model.n_classes);
            return out;
        }
    }
    throw std::logic_error("unknown learner kind");
}

std::vector<int> predict(const FittedModel& model, const RowView& view) {
    if (view.n_features() != model.n_features) {
        throw std::invalid_argument("predict: feature width mismatch");
    }
    Matrix raw(view.size(), view.n_features());
    for (std::size_t i = 0; i < view.size(); ++i) {
        std::copy_n(view.x_row(i), view.n_features(), raw.row(i));
    }
    return predict(model, raw);
}

std::string FittedModel::to_json() const {
    nlohmann::json j;
    j["kind"] = std::string(to_string(kind));
    j["n_features"] = n_features;
    j["n_classes"] = n_classes;
    switch (kind) {
        case LearnerKind::Featureless:
            j["majority_class"] = majority_class;
            break;
        case LearnerKind::Knn:
            j["chosen_k"] = chosen_k;
            j["standardizer"] = {{"mean", standardizer.mean}, {"scale", standardizer.scale}};
            break;
        case LearnerKind::L1Logistic: {
            j["chosen_lambda"] = chosen_lambda;
            j["lambda_max"] = lambda_max;
            j["intercepts"] = intercepts;
            std::vector<std::vector<double>> w(weights.rows());
            for (std::size_t c = 0; c < weights.rows(); ++c) {
                w[c].assign(weights.row(c), weights.row(c) + weights.cols());
            }
            j["weights"] = w;
            j["standardizer"] = {{"mean", standardizer.mean}, {"scale", standardizer.scale}};
            j["cv_mean_error"] = cv_mean_error;
            break;
        }
    }
    if (!warnings.empty()) j["warnings"] = warnings;
    j["fit_seconds"] = fit_seconds;
    return j.dump();
}

}  // namespace soak
