#include "soak/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>

#include "soak/rng.hpp"

namespace soak {

std::uint64_t Dataset::digest() const {
    std::uint64_t h = fnv1a64(name);
    const auto mix_int = [&h](std::uint64_t v) {
        char buf[8];
        std::memcpy(buf, &v, 8);
        h = fnv1a64(std::string_view(buf, 8), h);
    };
    mix_int(n_rows());
    mix_int(n_features());
    mix_int(n_classes());
    mix_int(n_subsets());
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(features.data()),
                                 features.rows() * features.cols() * sizeof(double)),
                h);
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(labels.data()),
                                 labels.size() * sizeof(int)),
                h);
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(subsets.data()),
                                 subsets.size() * sizeof(int)),
                h);
    if (has_groups()) {
        h = fnv1a64(std::string_view(reinterpret_cast<const char*>(groups.data()),
                                     groups.size() * sizeof(int)),
                    h);
    }
    return h;
}

ValidationReport validate(const Dataset& d) {
    ValidationReport report;
    auto add = [&report](const std::string& msg) { report.violations.push_back(msg); };

    const std::size_t n = d.n_rows();
    if (n == 0) add("dataset has no rows");
    if (d.n_features() == 0) add("dataset has no feature columns");
    if (d.features.rows() != n) add("feature matrix row count does not match label count");
    if (d.subsets.size() != n) add("subset vector length does not match row count");
    if (d.has_groups() && d.groups.size() != n) add("group vector length does not match row count");

    if (d.n_classes() < 2) add("single class: need at least 2 classes");
    if (d.n_subsets() < 1) add("no subsets defined");

    std::vector<std::size_t> class_counts(d.n_classes(), 0);
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        const int c = d.labels[i];
        if (c < 0 || static_cast<std::size_t>(c) >= d.n_classes()) {
            add("row " + std::to_string(i) + ": label index " + std::to_string(c) + " out of range");
        } else {
            ++class_counts[c];
        }
    }
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
        if (class_counts[c] == 0) {
            add("class '" + d.class_names[c] + "' has no rows");
        }
    }

    std::vector<std::size_t> subset_counts(d.n_subsets(), 0);
    for (std::size_t i = 0; i < d.subsets.size(); ++i) {
        const int s = d.subsets[i];
        if (s < 0 || static_cast<std::size_t>(s) >= d.n_subsets()) {
            add("row " + std::to_string(i) + ": subset index " + std::to_string(s) + " out of range");
        } else {
            ++subset_counts[s];
        }
    }
    for (std::size_t s = 0; s < subset_counts.size(); ++s) {
        if (subset_counts[s] == 0) {
            add("empty subset '" + d.subset_names[s] + "'");
        }
    }

    for (std::size_t i = 0; i < d.features.rows(); ++i) {
        for (std::size_t j = 0; j < d.features.cols(); ++j) {
            if (!std::isfinite(d.features(i, j))) {
                add("non-finite feature value at row " + std::to_string(i) + ", column " +
                    std::to_string(j));
            }
        }
    }

    if (d.has_groups() && d.subsets.size() == n) {
        // a group must never straddle subsets
        std::map<int, int> group_subset;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [it, inserted] = group_subset.emplace(d.groups[i], d.subsets[i]);
            if (!inserted && it->second != d.subsets[i]) {
                add("group " + std::to_string(d.groups[i]) + " straddles subsets");
            }
        }
    }

    return report;
}

void require_valid(const Dataset& d) {
    const ValidationReport report = validate(d);
    if (report.ok()) return;
    std::ostringstream msg;
    msg << "invalid dataset '" << d.name << "':";
    for (const auto& v : report.violations) msg << "\n  - " << v;
    throw std::invalid_argument(msg.str());
}

MetaSummary meta_summary(const Dataset& d) {
    MetaSummary m;
    m.rows = d.n_rows();
    m.features = d.n_features();
    m.classes = d.n_classes();
    m.subsets = d.n_subsets();

    const auto imbalance = [](const std::vector<std::size_t>& counts) {
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        return static_cast<double>(*hi) / static_cast<double>(*lo);
    };

    std::vector<std::size_t> class_counts(d.n_classes(), 0);
    for (const int c : d.labels) ++class_counts[c];
    m.class_imbalance = imbalance(class_counts);

    std::vector<std::size_t> subset_counts(d.n_subsets(), 0);
    for (const int s : d.subsets) ++subset_counts[s];
    m.subset_imbalance = imbalance(subset_counts);

    return m;
}

}  // namespace soak
