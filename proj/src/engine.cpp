#include "soak/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "soak/csv.hpp"
#include "soak/rng.hpp"

namespace soak {

namespace {

std::string hex16(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::uint64_t fnv_str(std::uint64_t h, std::string_view text) {
    return fnv1a64("|", fnv1a64(text, h));
}

std::uint64_t fnv_u64(std::uint64_t h, std::uint64_t value) {
    char buf[21];
    std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(value));
    return fnv_str(h, buf);
}

// Stable content key: dataset, learner, subset, fold, policy, run seed.
std::uint64_t job_key_hash(const std::string& dataset, LearnerKind learner, int subset,
                           int fold, TrainPolicy policy, std::uint64_t seed) {
    std::uint64_t h = fnv_str(0xcbf29ce484222325ULL, dataset);
    h = fnv_str(h, to_string(learner));
    h = fnv_u64(h, static_cast<std::uint64_t>(subset));
    h = fnv_u64(h, static_cast<std::uint64_t>(fold));
    h = fnv_str(h, to_string(policy));
    h = fnv_u64(h, seed);
    return h;
}

const char* policy_json(TrainPolicy policy) { return to_string(policy).data(); }

}  // namespace

std::string_view to_string(JobStatus status) {
    switch (status) {
        case JobStatus::Pending: return "pending";
        case JobStatus::Done: return "done";
        case JobStatus::Skipped: return "skipped";
        case JobStatus::Failed: return "failed";
    }
    return "?";
}

RunManifest plan(const std::vector<const Dataset*>& datasets,
                 const std::vector<LearnerKind>& learners, int k, std::uint64_t seed,
                 const std::vector<TrainPolicy>& policies) {
    if (datasets.empty()) throw std::invalid_argument("plan: no datasets");
    if (learners.empty()) throw std::invalid_argument("plan: no learners");
    if (policies.empty()) throw std::invalid_argument("plan: no policies");
    if (k < 2) throw std::invalid_argument("plan: k must be >= 2");

    RunManifest manifest;
    manifest.seed = seed;
    manifest.k = k;
    manifest.learners = learners;

    // canonical policy order, duplicates collapsed
    for (const TrainPolicy p : {TrainPolicy::Same, TrainPolicy::Other, TrainPolicy::All}) {
        if (std::find(policies.begin(), policies.end(), p) != policies.end()) {
            manifest.policies.push_back(p);
        }
    }

    std::set<std::string> names;
    for (const Dataset* ds : datasets) {
        if (!names.insert(ds->name).second) {
            throw std::invalid_argument("plan: duplicate dataset name: " + ds->name);
        }
        manifest.dataset_names.push_back(ds->name);
        manifest.dataset_digests.push_back(hex16(ds->digest()));
    }

    std::uint64_t config = fnv_u64(0xcbf29ce484222325ULL, seed);
    config = fnv_u64(config, static_cast<std::uint64_t>(k));
    for (const TrainPolicy p : manifest.policies) config = fnv_str(config, to_string(p));
    for (const LearnerKind l : learners) config = fnv_str(config, to_string(l));
    for (std::size_t i = 0; i < manifest.dataset_names.size(); ++i) {
        config = fnv_str(config, manifest.dataset_names[i]);
        config = fnv_str(config, manifest.dataset_digests[i]);
    }
    manifest.config_digest = hex16(config);

    std::set<std::string> ids;
    for (const Dataset* ds : datasets) {
        const bool single_subset = ds->n_subsets() == 1;
        for (const LearnerKind learner : learners) {
            for (int subset = 0; subset < static_cast<int>(ds->n_subsets()); ++subset) {
                for (int fold = 1; fold <= k; ++fold) {
                    for (const TrainPolicy policy : manifest.policies) {
                        if (single_subset && policy != TrainPolicy::Same) continue;
                        Job job;
                        job.dataset = ds->name;
                        job.learner = learner;
                        job.test_subset = subset;
                        job.test_fold = fold;
                        job.policy = policy;
                        const std::uint64_t h =
                            job_key_hash(ds->name, learner, subset, fold, policy, seed);
                        job.job_id = hex16(h);
                        job.job_seed = mix64(seed, h);
                        if (!ids.insert(job.job_id).second) {
                            throw std::runtime_error("plan: job_id collision at " + job.job_id);
                        }
                        manifest.jobs.push_back(std::move(job));
                    }
                }
            }
        }
    }
    return manifest;
}

std::string record_to_json(const EvalRecord& record, const std::string& job_id) {
    nlohmann::json j;
    j["job_id"] = job_id;
    j["data"] = record.dataset;
    j["learner"] = record.learner;
    j["subset"] = record.subset;
    j["fold"] = record.fold;
    j["policy"] = policy_json(record.policy);
    j["test_error"] = record.test_error;
    j["n_train"] = record.n_train;
    j["n_test"] = record.n_test;
    j["fit_seconds"] = record.fit_seconds;
    return j.dump();
}

std::string canonical_record_line(const EvalRecord& record) {
    std::string out = record.dataset;
    out += '|';
    out += record.learner;
    out += '|';
    out += record.subset;
    out += '|';
    out += std::to_string(record.fold);
    out += '|';
    out += to_string(record.policy);
    out += '|';
    out += csv::format_double(record.test_error);
    out += '|';
    out += std::to_string(record.n_train);
    out += '|';
    out += std::to_string(record.n_test);
    return out;
}

std::vector<std::string> sorted_canonical_lines(const std::vector<EvalRecord>& records) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const EvalRecord& r : records) lines.push_back(canonical_record_line(r));
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::vector<EvalRecord> load_records(const std::string& path,
                                     std::vector<std::string>* job_ids) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("results store: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::vector<EvalRecord> records;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        const bool truncated = end == std::string::npos;
        if (truncated) end = text.size();
        const std::string_view line(text.data() + start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            // a torn trailing line is the crash-during-append case
            if (truncated || start >= text.size()) break;
            throw std::runtime_error("results store: corrupt line in " + path);
        }
        EvalRecord record;
        record.dataset = j.at("data").get<std::string>();
        record.learner = j.at("learner").get<std::string>();
        record.subset = j.at("subset").get<std::string>();
        record.fold = j.at("fold").get<int>();
        const auto policy = parse_policy(j.at("policy").get<std::string>());
        if (!policy) throw std::runtime_error("results store: unknown policy in " + path);
        record.policy = *policy;
        record.test_error = j.at("test_error").get<double>();
        record.n_train = j.at("n_train").get<std::size_t>();
        record.n_test = j.at("n_test").get<std::size_t>();
        record.fit_seconds = j.value("fit_seconds", 0.0);
        if (job_ids) job_ids->push_back(j.at("job_id").get<std::string>());
        records.push_back(std::move(record));
    }
    return records;
}

ExecuteOutcome execute(RunManifest& manifest,
                       const std::map<std::string, const Dataset*>& datasets,
                       const ExecuteOptions& options) {
    if (options.workers < 1) throw std::invalid_argument("execute: workers must be >= 1");

    // Bind datasets and fold assignments once; digests guard against a
    // manifest being replayed on different data.
    std::map<std::string, const Dataset*> bound;
    std::map<std::string, FoldAssignment> folds;
    for (std::size_t i = 0; i < manifest.dataset_names.size(); ++i) {
        const std::string& name = manifest.dataset_names[i];
        const auto it = datasets.find(name);
        if (it == datasets.end()) {
            throw std::invalid_argument("execute: dataset not supplied: " + name);
        }
        if (hex16(it->second->digest()) != manifest.dataset_digests[i]) {
            throw std::invalid_argument("execute: dataset content changed: " + name);
        }
        bound[name] = it->second;
        const auto fold_it = options.fold_overrides.find(name);
        folds[name] = fold_it != options.fold_overrides.end()
                          ? fold_it->second
                          : assign_folds(*it->second, manifest.k, manifest.seed);
    }

    // Resume: adopt records already in the store.
    std::vector<std::optional<EvalRecord>> adopted(manifest.jobs.size());
    if (!options.results_path.empty()) {
        std::ifstream probe(options.results_path);
        if (probe.good()) {
            std::vector<std::string> ids;
            std::vector<EvalRecord> prior = load_records(options.results_path, &ids);
            std::map<std::string, std::size_t> by_id;
            for (std::size_t i = 0; i < manifest.jobs.size(); ++i) {
                by_id[manifest.jobs[i].job_id] = i;
            }
            for (std::size_t r = 0; r < prior.size(); ++r) {
                const auto it = by_id.find(ids[r]);
                if (it == by_id.end()) continue;  // foreign record, ignore
                adopted[it->second] = std::move(prior[r]);
                manifest.jobs[it->second].status = JobStatus::Done;
            }
        }
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < manifest.jobs.size(); ++i) {
        if (manifest.jobs[i].status != JobStatus::Done || !adopted[i]) {
            if (manifest.jobs[i].status == JobStatus::Done && !adopted[i]) {
                // a manifest claiming done without a stored record re-runs
                manifest.jobs[i].status = JobStatus::Pending;
            }
            pending.push_back(i);
        }
    }
    if (options.max_jobs > 0 && pending.size() > options.max_jobs) {
        pending.resize(options.max_jobs);
    }

    std::ofstream store;
    if (!options.results_path.empty()) {
        store.open(options.results_path, std::ios::binary | std::ios::app);
        if (!store) throw std::runtime_error("results store: cannot append to " +
                                             options.results_path);
    }

    bool io_error = false;
    const auto n_pending = static_cast<long long>(pending.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.workers)
#endif
    for (long long idx = 0; idx < n_pending; ++idx) {
        Job& job = manifest.jobs[pending[static_cast<std::size_t>(idx)]];
        const Dataset& ds = *bound.at(job.dataset);
        const FoldAssignment& fa = folds.at(job.dataset);
        try {
            const SplitSpec split =
                build_split(ds, fa, job.test_subset, job.test_fold, job.policy);
            if (split.test_rows.empty() || split.train_rows.empty()) {
                job.status = JobStatus::Skipped;
                job.message = split.test_rows.empty() ? "empty test set" : "empty train set";
                continue;
            }
            const SplitViews views = resolve_split(split, ds);
            LearnerSpec spec;
            spec.kind = job.learner;
            spec.seed = job.job_seed;
            const FittedModel model = fit(views.train, spec);
            const std::vector<int> predicted = predict(model, views.test);
            std::vector<int> truth(views.test.size());
            for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = views.test.y(i);

            EvalRecord record;
            record.dataset = ds.name;
            record.learner = std::string(to_string(job.learner));
            record.subset = ds.subset_names[static_cast<std::size_t>(job.test_subset)];
            record.fold = job.test_fold;
            record.policy = job.policy;
            record.test_error = error_rate(predicted, truth);
            record.n_train = views.train.size();
            record.n_test = views.test.size();
            record.fit_seconds = model.fit_seconds;

            const std::string line = record_to_json(record, job.job_id);
#ifdef _OPENMP
#pragma omp critical(soak_results_store)
#endif
            {
                if (store.is_open()) {
                    store << line << '\n';
                    store.flush();
                    if (!store) io_error = true;
                }
            }
            adopted[pending[static_cast<std::size_t>(idx)]] = std::move(record);
            job.status = JobStatus::Done;
        } catch (const std::exception& e) {
            job.status = JobStatus::Failed;
            job.message = e.what();
        } catch (...) {
            job.status = JobStatus::Failed;
            job.message = "unknown error";
        }
    }
    if (io_error) throw std::runtime_error("results store: write failed");

    ExecuteOutcome outcome;
    outcome.executed = pending.size();
    for (std::size_t i = 0; i < manifest.jobs.size(); ++i) {
        switch (manifest.jobs[i].status) {
            case JobStatus::Done:
                ++outcome.done;
                if (adopted[i]) outcome.records.push_back(*adopted[i]);
                break;
            case JobStatus::Skipped: ++outcome.skipped; break;
            case JobStatus::Failed: ++outcome.failed; break;
            case JobStatus::Pending: ++outcome.remaining; break;
        }
    }
    return outcome;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["k"] = k;
    nlohmann::json policy_list = nlohmann::json::array();
    for (const TrainPolicy p : policies) policy_list.push_back(policy_json(p));
    j["policies"] = policy_list;
    nlohmann::json learner_list = nlohmann::json::array();
    for (const LearnerKind l : learners) learner_list.push_back(std::string(to_string(l)));
    j["learners"] = learner_list;
    nlohmann::json dataset_list = nlohmann::json::array();
    for (std::size_t i = 0; i < dataset_names.size(); ++i) {
        dataset_list.push_back({{"name", dataset_names[i]}, {"digest", dataset_digests[i]}});
    }
    j["datasets"] = dataset_list;
    j["config_digest"] = config_digest;
    nlohmann::json job_list = nlohmann::json::array();
    for (const Job& job : jobs) {
        nlohmann::json entry;
        entry["job_id"] = job.job_id;
        entry["data"] = job.dataset;
        entry["learner"] = std::string(to_string(job.learner));
        entry["subset"] = job.test_subset;
        entry["fold"] = job.test_fold;
        entry["policy"] = policy_json(job.policy);
        entry["seed"] = job.job_seed;
        entry["status"] = std::string(to_string(job.status));
        if (!job.message.empty()) entry["message"] = job.message;
        job_list.push_back(std::move(entry));
    }
    j["jobs"] = job_list;
    return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunManifest manifest;
    manifest.seed = j.at("seed").get<std::uint64_t>();
    manifest.k = j.at("k").get<int>();
    for (const auto& p : j.at("policies")) {
        const auto policy = parse_policy(p.get<std::string>());
        if (!policy) throw std::runtime_error("manifest: unknown policy");
        manifest.policies.push_back(*policy);
    }
    for (const auto& l : j.at("learners")) {
        const auto learner = parse_learner(l.get<std::string>());
        if (!learner) throw std::runtime_error("manifest: unknown learner");
        manifest.learners.push_back(*learner);
    }
    for (const auto& d : j.at("datasets")) {
        manifest.dataset_names.push_back(d.at("name").get<std::string>());
        manifest.dataset_digests.push_back(d.at("digest").get<std::string>());
    }
    manifest.config_digest = j.at("config_digest").get<std::string>();
    for (const auto& entry : j.at("jobs")) {
        Job job;
        job.job_id = entry.at("job_id").get<std::string>();
        job.dataset = entry.at("data").get<std::string>();
        const auto learner = parse_learner(entry.at("learner").get<std::string>());
        if (!learner) throw std::runtime_error("manifest: unknown learner");
        job.learner = *learner;
        job.test_subset = entry.at("subset").get<int>();
        job.test_fold = entry.at("fold").get<int>();
        const auto policy = parse_policy(entry.at("policy").get<std::string>());
        if (!policy) throw std::runtime_error("manifest: unknown policy");
        job.policy = *policy;
        job.job_seed = entry.at("seed").get<std::uint64_t>();
        const std::string status = entry.at("status").get<std::string>();
        if (status == "pending") job.status = JobStatus::Pending;
        else if (status == "done") job.status = JobStatus::Done;
        else if (status == "skipped") job.status = JobStatus::Skipped;
        else if (status == "failed") job.status = JobStatus::Failed;
        else throw std::runtime_error("manifest: unknown status");
        job.message = entry.value("message", "");
        manifest.jobs.push_back(std::move(job));
    }
    return manifest;
}

void RunManifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot write " + path);
    out << to_json() << '\n';
    if (!out) throw std::runtime_error("manifest: write failed: " + path);
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("manifest: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

}  // namespace soak
