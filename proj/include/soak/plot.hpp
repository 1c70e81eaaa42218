#pragma once

#include <string>
#include <vector>

#include "soak/stats.hpp"

namespace soak {

// Pure renderers: identical rows give byte-identical SVG. Both throw
// std::invalid_argument on empty input — callers surface "nothing to plot"
// instead of writing a degenerate file.

// Min/max segment chart per (dataset, learner, comparison): left panel
// log10(p) with a 0.05 reference line, right panel error difference in
// percentage points with a zero line; dot at the mean over subsets.
std::string render_comparison_svg(const std::vector<SubsetComparison>& rows);

// Mean +/- SD test error per (dataset, subset) panel, one row per
// (policy, learner), errors shown in percent.
std::string render_error_stats_svg(const std::vector<ErrorStats>& rows);

}  // namespace soak
