#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "soak/dataset.hpp"
#include "soak/learners.hpp"
#include "soak/resampling.hpp"
#include "soak/stats.hpp"

namespace soak {

enum class JobStatus { Pending, Done, Skipped, Failed };

std::string_view to_string(JobStatus status);

// One (dataset, learner, subset, fold, policy) unit of work. The id is a
// content hash, so replanning identical inputs reproduces it; the seed is
// derived from (run seed, id), so results never depend on execution order.
struct Job {
    std::string job_id;  // 16 hex digits
    std::string dataset;
    LearnerKind learner = LearnerKind::Featureless;
    int test_subset = 0;  // subset index
    int test_fold = 0;    // 1..k
    TrainPolicy policy = TrainPolicy::Same;
    std::uint64_t job_seed = 0;
    JobStatus status = JobStatus::Pending;
    std::string message;  // failure reason or skip cause
};

struct RunManifest {
    std::uint64_t seed = 0;
    int k = 0;
    std::vector<TrainPolicy> policies;
    std::vector<LearnerKind> learners;
    std::vector<std::string> dataset_names;
    std::vector<std::string> dataset_digests;  // hex, aligned with names
    std::string config_digest;                 // hex hash of the plan inputs
    std::vector<Job> jobs;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

// Full (subset x fold x policy) cell grid per dataset and learner; S=1
// datasets get Same cells only. Cells that turn out empty are skipped at
// execution time. Throws on duplicate dataset names or empty inputs.
RunManifest plan(const std::vector<const Dataset*>& datasets,
                 const std::vector<LearnerKind>& learners, int k, std::uint64_t seed,
                 const std::vector<TrainPolicy>& policies);

struct ExecuteOptions {
    int workers = 1;
    std::string results_path;  // NDJSON store; empty disables persistence
    std::size_t max_jobs = 0;  // stop after this many pending jobs (0 = all)
    // Replayed fold assignments by dataset name; missing entries fall back
    // to assign_folds(dataset, k, seed).
    std::map<std::string, FoldAssignment> fold_overrides;
};

struct ExecuteOutcome {
    std::vector<EvalRecord> records;  // resumed + newly computed, job order
    std::size_t executed = 0;         // pending jobs processed this call
    std::size_t done = 0;             // manifest totals after the call
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::size_t remaining = 0;
};

// Runs every pending job. Jobs already present in the results store are
// adopted as done without re-running (resume contract). Worker count only
// changes scheduling, never results. Learner exceptions mark the job
// failed and the run continues; results-store I/O failures abort.
ExecuteOutcome execute(RunManifest& manifest,
                       const std::map<std::string, const Dataset*>& datasets,
                       const ExecuteOptions& options);

// NDJSON record round-trip. The full form carries job_id and fit_seconds;
// the canonical line drops both (fit_seconds is wall time, job_id is
// derivable), so sorted canonical lines compare byte-identically across
// worker counts and resume boundaries.
std::string record_to_json(const EvalRecord& record, const std::string& job_id);
std::string canonical_record_line(const EvalRecord& record);
std::vector<std::string> sorted_canonical_lines(const std::vector<EvalRecord>& records);

// Loads a results store, tolerating a truncated final line (crash during
// append). `job_ids` receives the id field per returned record.
std::vector<EvalRecord> load_records(const std::string& path,
                                     std::vector<std::string>* job_ids = nullptr);

}  // namespace soak
