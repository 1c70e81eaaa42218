#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "soak/dataset.hpp"
#include "soak/learners.hpp"
#include "soak/resampling.hpp"

namespace soak {

// Everything a run needs; mirrors the command-line flags one-to-one and the
// JSON config file keys (flags override file values).
struct RunConfig {
    std::vector<std::string> data_paths;
    std::string label_col;
    std::string subset_col;
    std::string group_col;  // optional
    int folds = 10;
    std::uint64_t seed = 0;
    std::vector<LearnerKind> learners;
    std::vector<TrainPolicy> policies = {TrainPolicy::Same, TrainPolicy::Other,
                                         TrainPolicy::All};
    int workers = 1;
    std::string out_dir = "soak_out";
    std::string folds_file;    // optional replay of an exported assignment
    std::size_t max_jobs = 0;  // testing hook: stop after this many jobs
};

// JSON config file with keys data (array or string), label_col, subset_col,
// group_col, folds, seed, learners, policies, workers, out. Unknown keys are
// rejected so typos fail loudly.
RunConfig config_from_json_file(const std::string& path);

// Comma lists from the flags. Throw on unknown names.
std::vector<LearnerKind> parse_learner_list(const std::string& csv_list);
std::vector<TrainPolicy> parse_policy_list(const std::string& csv_list);

// CSV ingestion: every non-label/subset/group column is a real-valued
// feature; label and subset cells are categorical strings mapped to indices
// in lexicographic name order. Dataset name is the file stem.
Dataset load_csv(const std::string& path, const RunConfig& config);

// Table-1-style CSV, one row per data file, written to `out`.
int cmd_meta(const RunConfig& config, std::ostream& out);

// Full pipeline: plan, execute, and write manifest.json, records.ndjson,
// records.csv, comparisons.csv/json, summary.csv, error_stats.csv under
// config.out_dir. Returns 0 iff no job failed.
int cmd_run(const RunConfig& config, std::ostream& log);

// Renders plots from a cmd_run output directory. Errors (return != 0) when
// the comparison table has no rows.
int cmd_plot(const std::string& run_dir, std::ostream& log);

int cmd_folds_export(const RunConfig& config, const std::string& out_path,
                     std::ostream& log);
int cmd_folds_import(const RunConfig& config, const std::string& in_path,
                     std::ostream& log);

}  // namespace soak
