#include "soak/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace soak {

double error_rate(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("prediction/truth length mismatch");
    }
    if (predicted.empty()) throw std::invalid_argument("empty prediction vector");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] != truth[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, int df) {
    if (df < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
    if (!std::isfinite(x)) throw std::invalid_argument("t statistic must be finite");
    if (x == 0.0) return 0.5;
    const double v = static_cast<double>(df);
    const double u = v / (v + x * x);
    const double tail = 0.5 * regularized_incomplete_beta(v / 2.0, 0.5, u);
    return x > 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_ttest(std::span<const double> diffs) {
    const std::size_t k = diffs.size();
    if (k < 2) throw std::invalid_argument("paired t-test needs at least 2 differences");

    TTestResult result;
    double sum = 0.0;
    for (const double d : diffs) sum += d;
    result.mean_diff = sum / static_cast<double>(k);

    double ss = 0.0;
    for (const double d : diffs) {
        const double dev = d - result.mean_diff;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(k - 1));

    if (sd == 0.0) {
        result.degenerate = true;
        if (result.mean_diff == 0.0) {
            result.t_stat = 0.0;
            result.p_value = 1.0;
        } else {
            result.t_stat = result.mean_diff > 0.0
                                ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
            result.p_value = 0.0;
        }
        return result;
    }

    result.t_stat = result.mean_diff / (sd / std::sqrt(static_cast<double>(k)));
    result.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(result.t_stat), static_cast<int>(k) - 1));
    result.p_value = std::clamp(result.p_value, 0.0, 1.0);
    return result;
}

std::string_view to_string(ComparisonKind kind) {
    return kind == ComparisonKind::OtherVsSame ? "other_vs_same" : "all_vs_same";
}

CompareResult soak_compare(const std::vector<EvalRecord>& records) {
    CompareResult result;
    if (records.empty()) return result;

    const std::string& dataset = records.front().dataset;
    const std::string& learner = records.front().learner;
    for (const auto& r : records) {
        if (r.dataset != dataset || r.learner != learner) {
            throw std::invalid_argument("soak_compare expects records from one (dataset, learner)");
        }
    }

    // subset -> fold -> policy -> error; map keys make the output independent
    // of record ordering.
    std::map<std::string, std::map<int, std::map<TrainPolicy, double>>> table;
    for (const auto& r : records) {
        table[r.subset][r.fold][r.policy] = r.test_error;
    }

    for (const auto& [subset, folds] : table) {
        for (const ComparisonKind kind : {ComparisonKind::OtherVsSame, ComparisonKind::AllVsSame}) {
            const TrainPolicy treatment =
                kind == ComparisonKind::OtherVsSame ? TrainPolicy::Other : TrainPolicy::All;
            bool any_same = false;
            bool any_treatment = false;
            std::vector<double> diffs;  // percentage points
            for (const auto& [fold, by_policy] : folds) {
                const auto same_it = by_policy.find(TrainPolicy::Same);
                const auto treat_it = by_policy.find(treatment);
                any_same = any_same || same_it != by_policy.end();
                any_treatment = any_treatment || treat_it != by_policy.end();
                if (same_it == by_policy.end() || treat_it == by_policy.end()) continue;
                diffs.push_back(100.0 * (treat_it->second - same_it->second));
            }
            if (!any_treatment) continue;  // policy not run at all (e.g., S=1)
            if (!any_same) {
                result.notices.push_back("subset '" + subset + "': no Same records, " +
                                         std::string(to_string(kind)) + " skipped");
                continue;
            }
            if (diffs.size() < 2) {
                result.notices.push_back("subset '" + subset + "': only " +
                                         std::to_string(diffs.size()) + " paired fold(s), " +
                                         std::string(to_string(kind)) + " not computable");
                continue;
            }
            const TTestResult tt = paired_ttest(diffs);
            SubsetComparison comparison;
            comparison.dataset = dataset;
            comparison.learner = learner;
            comparison.subset = subset;
            comparison.kind = kind;
            comparison.mean_diff = tt.mean_diff;
            comparison.t_stat = tt.t_stat;
            comparison.p_value = tt.p_value;
            comparison.k_used = static_cast<int>(diffs.size());
            result.comparisons.push_back(std::move(comparison));
        }
    }
    return result;
}

double log10_clamped(double p) {
    return std::log10(std::max(p, 1e-300));
}

DatasetSummary summarize_dataset(const std::vector<SubsetComparison>& comparisons) {
    if (comparisons.empty()) {
        throw std::invalid_argument("summarize_dataset needs at least one comparison");
    }
    DatasetSummary summary;
    summary.dataset = comparisons.front().dataset;
    summary.learner = comparisons.front().learner;
    summary.kind = comparisons.front().kind;
    summary.min_diff = std::numeric_limits<double>::infinity();
    summary.max_diff = -std::numeric_limits<double>::infinity();
    summary.min_log10p = std::numeric_limits<double>::infinity();
    summary.max_log10p = -std::numeric_limits<double>::infinity();
    double diff_sum = 0.0;
    for (const auto& c : comparisons) {
        if (c.dataset != summary.dataset || c.kind != summary.kind) {
            throw std::invalid_argument("summarize_dataset expects one dataset and one comparison kind");
        }
        summary.min_diff = std::min(summary.min_diff, c.mean_diff);
        summary.max_diff = std::max(summary.max_diff, c.mean_diff);
        const double lp = log10_clamped(c.p_value);
        summary.min_log10p = std::min(summary.min_log10p, lp);
        summary.max_log10p = std::max(summary.max_log10p, lp);
        diff_sum += c.mean_diff;
    }
    // never detrimental -> similar; never beneficial -> different; mixed
    // cases resolved by the sign of the mean over subsets.
    if (summary.max_diff <= 0.0) {
        summary.category = "similar";
    } else if (summary.min_diff >= 0.0) {
        summary.category = "different";
    } else {
        summary.category = diff_sum / static_cast<double>(comparisons.size()) <= 0.0
                               ? "similar"
                               : "different";
    }
    return summary;
}

std::vector<ErrorStats> error_stat_table(const std::vector<EvalRecord>& records) {
    std::map<std::tuple<std::string, std::string, std::string, int>, std::vector<double>> cells;
    for (const auto& r : records) {
        cells[{r.dataset, r.learner, r.subset, static_cast<int>(r.policy)}].push_back(r.test_error);
    }
    std::vector<ErrorStats> table;
    table.reserve(cells.size());
    for (const auto& [key, errors] : cells) {
        ErrorStats stats;
        stats.dataset = std::get<0>(key);
        stats.learner = std::get<1>(key);
        stats.subset = std::get<2>(key);
        stats.policy = static_cast<TrainPolicy>(std::get<3>(key));
        stats.folds = static_cast<int>(errors.size());
        double sum = 0.0;
        for (const double e : errors) sum += e;
        stats.mean_error = sum / static_cast<double>(errors.size());
        if (errors.size() > 1) {
            double ss = 0.0;
            for (const double e : errors) {
                const double dev = e - stats.mean_error;
                ss += dev * dev;
            }
            stats.sd_error = std::sqrt(ss / static_cast<double>(errors.size() - 1));
        }
        table.push_back(std::move(stats));
    }
    return table;
}

}  // namespace soak
