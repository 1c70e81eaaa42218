#include "soak/resampling.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <stdexcept>

#include "soak/rng.hpp"

namespace soak {

std::string_view to_string(TrainPolicy policy) {
    switch (policy) {
        case TrainPolicy::Same: return "same";
        case TrainPolicy::Other: return "other";
        case TrainPolicy::All: return "all";
    }
    return "?";
}

std::optional<TrainPolicy> parse_policy(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "same") return TrainPolicy::Same;
    if (lower == "other") return TrainPolicy::Other;
    if (lower == "all") return TrainPolicy::All;
    return std::nullopt;
}

FoldAssignment assign_folds(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be at least 2");

    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.folds.assign(d.n_rows(), 0);

    const std::size_t n_subsets = d.n_subsets();
    const std::size_t uk = static_cast<std::size_t>(k);

    if (!d.has_groups()) {
        // Stratified on (subset, class). Each stratum is shuffled with its
        // own seed stream, then dealt round-robin continuing a per-subset
        // position, so remainders spread over folds and any subset with at
        // least k rows covers every fold.
        for (std::size_t s = 0; s < n_subsets; ++s) {
            std::size_t pos = 0;
            for (std::size_t c = 0; c < d.n_classes(); ++c) {
                std::vector<int> rows;
                for (std::size_t i = 0; i < d.n_rows(); ++i) {
                    if (d.subsets[i] == static_cast<int>(s) && d.labels[i] == static_cast<int>(c)) {
                        rows.push_back(static_cast<int>(i));
                    }
                }
                if (rows.empty()) continue;
                SplitMix64 rng(mix64(seed, mix64(s + 1, c + 1)));
                shuffle(rows, rng);
                for (const int row : rows) {
                    fa.folds[static_cast<std::size_t>(row)] = static_cast<int>(pos % uk) + 1;
                    ++pos;
                }
            }
        }
    } else {
        // Whole groups dealt round-robin within each subset after a seeded
        // shuffle; class balance is not enforced since a group may mix
        // classes.
        for (std::size_t s = 0; s < n_subsets; ++s) {
            std::vector<int> group_ids;
            std::map<int, std::vector<int>> rows_of_group;
            for (std::size_t i = 0; i < d.n_rows(); ++i) {
                if (d.subsets[i] != static_cast<int>(s)) continue;
                auto [it, inserted] = rows_of_group.try_emplace(d.groups[i]);
                if (inserted) group_ids.push_back(d.groups[i]);
                it->second.push_back(static_cast<int>(i));
            }
            std::sort(group_ids.begin(), group_ids.end());
            SplitMix64 rng(mix64(seed, s + 1));
            shuffle(group_ids, rng);
            if (group_ids.size() < uk) {
                fa.warnings.push_back("subset '" + d.subset_names[s] + "' has only " +
                                      std::to_string(group_ids.size()) + " groups for k=" +
                                      std::to_string(k) +
                                      "; some folds are empty and their splits will be skipped");
            }
            for (std::size_t g = 0; g < group_ids.size(); ++g) {
                const int fold = static_cast<int>((g + s) % uk) + 1;
                for (const int row : rows_of_group[group_ids[g]]) {
                    fa.folds[static_cast<std::size_t>(row)] = fold;
                }
            }
        }
    }

    return fa;
}

SplitSpec build_split(const Dataset& d, const FoldAssignment& fa, int test_subset,
                      int test_fold, TrainPolicy policy) {
    SplitSpec split;
    split.test_subset = test_subset;
    split.test_fold = test_fold;
    split.policy = policy;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        const bool in_fold = fa.folds[i] == test_fold;
        const bool in_subset = d.subsets[i] == test_subset;
        if (in_fold && in_subset) {
            split.test_rows.push_back(static_cast<int>(i));
            continue;
        }
        if (in_fold) continue;
        switch (policy) {
            case TrainPolicy::Same:
                if (in_subset) split.train_rows.push_back(static_cast<int>(i));
                break;
            case TrainPolicy::Other:
                if (!in_subset) split.train_rows.push_back(static_cast<int>(i));
                break;
            case TrainPolicy::All:
                split.train_rows.push_back(static_cast<int>(i));
                break;
        }
    }
    return split;
}

std::vector<SplitSpec> enumerate_splits(const Dataset& d, const FoldAssignment& fa,
                                        const std::vector<TrainPolicy>& policies) {
    if (fa.folds.size() != d.n_rows()) {
        throw std::invalid_argument("fold assignment does not match dataset row count");
    }
    const bool single_subset = d.n_subsets() == 1;

    std::vector<TrainPolicy> ordered;
    for (const TrainPolicy p : {TrainPolicy::Same, TrainPolicy::Other, TrainPolicy::All}) {
        if (std::find(policies.begin(), policies.end(), p) != policies.end()) {
            ordered.push_back(p);
        }
    }

    std::vector<SplitSpec> splits;
    for (std::size_t s = 0; s < d.n_subsets(); ++s) {
        for (int fold = 1; fold <= fa.k; ++fold) {
            for (const TrainPolicy policy : ordered) {
                if (single_subset && policy != TrainPolicy::Same) continue;
                SplitSpec split = build_split(d, fa, static_cast<int>(s), fold, policy);
                if (split.test_rows.empty() || split.train_rows.empty()) continue;
                splits.push_back(std::move(split));
            }
        }
    }
    return splits;
}

SplitViews resolve_split(const SplitSpec& split, const Dataset& d) {
    if (split.train_rows.empty()) throw std::runtime_error("empty train set");
    if (split.test_rows.empty()) throw std::runtime_error("empty test set");
    for (const auto* rows : {&split.train_rows, &split.test_rows}) {
        for (const int r : *rows) {
            if (r < 0 || static_cast<std::size_t>(r) >= d.n_rows()) {
                throw std::runtime_error("split row index out of range");
            }
        }
    }
    return SplitViews{RowView{&d, split.train_rows}, RowView{&d, split.test_rows}};
}

void export_folds_csv(const FoldAssignment& fa, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "row_id,fold\n";
    for (std::size_t i = 0; i < fa.folds.size(); ++i) {
        out << i << ',' << fa.folds[i] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

FoldAssignment import_folds_csv(const std::string& path, std::size_t expected_rows) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open folds file: " + path);

    FoldAssignment fa;
    fa.folds.assign(expected_rows, 0);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty folds file: " + path);

    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("malformed folds line: " + line);
        }
        std::size_t row = 0;
        int fold = 0;
        const auto r1 = std::from_chars(line.data(), line.data() + comma, row);
        const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), fold);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw std::runtime_error("malformed folds line: " + line);
        }
        if (row >= expected_rows) {
            throw std::runtime_error("folds file row_id " + std::to_string(row) +
                                     " out of range for dataset with " +
                                     std::to_string(expected_rows) + " rows");
        }
        if (fold < 1) throw std::runtime_error("fold ids must be >= 1");
        fa.folds[row] = fold;
        fa.k = std::max(fa.k, fold);
        ++seen;
    }
    if (seen != expected_rows) {
        throw std::runtime_error("folds file covers " + std::to_string(seen) + " of " +
                                 std::to_string(expected_rows) + " rows");
    }
    return fa;
}

}  // namespace soak
