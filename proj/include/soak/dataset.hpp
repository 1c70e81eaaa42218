#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soak/matrix.hpp"

namespace soak {

// One tabular classification problem: dense features, class labels, a
// subset id per row, and optionally a group id per row. Immutable after
// construction by convention; everything downstream shares it read-only.
//
// labels hold class indices in [0, n_classes), subsets hold subset indices
// in [0, n_subsets). An empty `groups` vector means every row is its own
// group.
struct Dataset {
    std::string name;
    Matrix features;                         // N x P
    std::vector<int> labels;                 // length N
    std::vector<std::string> class_names;    // length C
    std::vector<int> subsets;                // length N
    std::vector<std::string> subset_names;   // length S
    std::vector<int> groups;                 // length N or empty

    std::size_t n_rows() const { return labels.size(); }
    std::size_t n_features() const { return features.cols(); }
    std::size_t n_classes() const { return class_names.size(); }
    std::size_t n_subsets() const { return subset_names.size(); }
    bool has_groups() const { return !groups.empty(); }
    int group_of(std::size_t row) const {
        return has_groups() ? groups[row] : static_cast<int>(row);
    }

    // Content hash over dimensions, feature bytes, labels and subsets.
    std::uint64_t digest() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Checks every structural invariant; report-valued, never throws.
ValidationReport validate(const Dataset& dataset);

// Throws std::invalid_argument listing all violations.
void require_valid(const Dataset& dataset);

struct MetaSummary {
    std::size_t rows = 0;
    std::size_t features = 0;
    std::size_t classes = 0;
    double class_imbalance = 1.0;   // largest class count / smallest, >= 1
    std::size_t subsets = 0;
    double subset_imbalance = 1.0;  // largest subset count / smallest, >= 1
};

MetaSummary meta_summary(const Dataset& dataset);

}  // namespace soak
