#include "soak/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "soak/csv.hpp"
#include "soak/engine.hpp"
#include "soak/plot.hpp"
#include "soak/stats.hpp"

namespace fs = std::filesystem;

namespace soak {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    for (const char c : text) {
        if (c == ',') {
            parts.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current += c;
        }
    }
    parts.push_back(current);
    std::erase_if(parts, [](const std::string& p) { return p.empty(); });
    return parts;
}

std::string fmt_sig(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

std::optional<ComparisonKind> parse_comparison(std::string_view text) {
    if (text == "other_vs_same") return ComparisonKind::OtherVsSame;
    if (text == "all_vs_same") return ComparisonKind::AllVsSame;
    return std::nullopt;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::vector<LearnerKind> parse_learner_list(const std::string& csv_list) {
    std::vector<LearnerKind> out;
    for (const std::string& name : split_list(csv_list)) {
        const auto kind = parse_learner(name);
        if (!kind) {
            throw std::invalid_argument(
                "unknown learner '" + name +
                "' (expected featureless, knn or l1_logistic)");
        }
        if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
    }
    if (out.empty()) throw std::invalid_argument("learner list is empty");
    return out;
}

std::vector<TrainPolicy> parse_policy_list(const std::string& csv_list) {
    std::vector<TrainPolicy> out;
    for (const std::string& name : split_list(csv_list)) {
        const auto policy = parse_policy(name);
        if (!policy) {
            throw std::invalid_argument("unknown policy '" + name +
                                        "' (expected same, other or all)");
        }
        if (std::find(out.begin(), out.end(), *policy) == out.end()) out.push_back(*policy);
    }
    if (out.empty()) throw std::invalid_argument("policy list is empty");
    return out;
}

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }

    static const std::set<std::string> known = {
        "data",     "label_col", "subset_col", "group_col", "folds",    "seed",
        "learners", "policies",  "workers",    "out",       "folds_file", "max_jobs"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.contains(key)) {
            throw std::runtime_error("config file " + path + ": unknown key '" + key + "'");
        }
    }

    RunConfig config;
    if (j.contains("data")) {
        if (j["data"].is_string()) {
            config.data_paths.push_back(j["data"].get<std::string>());
        } else {
            config.data_paths = j["data"].get<std::vector<std::string>>();
        }
    }
    config.label_col = j.value("label_col", "");
    config.subset_col = j.value("subset_col", "");
    config.group_col = j.value("group_col", "");
    config.folds = j.value("folds", 10);
    config.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("learners")) {
        if (j["learners"].is_string()) {
            config.learners = parse_learner_list(j["learners"].get<std::string>());
        } else {
            std::string joined;
            for (const auto& item : j["learners"]) {
                if (!joined.empty()) joined += ',';
                joined += item.get<std::string>();
            }
            config.learners = parse_learner_list(joined);
        }
    }
    if (j.contains("policies")) {
        if (j["policies"].is_string()) {
            config.policies = parse_policy_list(j["policies"].get<std::string>());
        } else {
            std::string joined;
            for (const auto& item : j["policies"]) {
                if (!joined.empty()) joined += ',';
                joined += item.get<std::string>();
            }
            config.policies = parse_policy_list(joined);
        }
    }
    config.workers = j.value("workers", 1);
    config.out_dir = j.value("out", std::string("soak_out"));
    config.folds_file = j.value("folds_file", "");
    config.max_jobs = j.value("max_jobs", std::size_t{0});
    return config;
}

Dataset load_csv(const std::string& path, const RunConfig& config) {
    if (config.label_col.empty()) throw std::invalid_argument("label column not set");
    if (config.subset_col.empty()) throw std::invalid_argument("subset column not set");
    if (config.label_col == config.subset_col) {
        throw std::invalid_argument("label and subset columns must differ");
    }

    const auto rows = csv::read_file(path);
    if (rows.empty()) throw std::runtime_error(path + ": empty file");
    const std::vector<std::string>& header = rows.front();

    const auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    const auto require_col = [&](const std::string& name, const char* what) {
        const int idx = find_col(name);
        if (idx < 0) {
            std::string msg = path + ": " + what + " column '" + name +
                              "' not found; header has:";
            for (const std::string& h : header) msg += " " + h;
            throw std::runtime_error(msg);
        }
        return idx;
    };

    const int label_idx = require_col(config.label_col, "label");
    const int subset_idx = require_col(config.subset_col, "subset");
    const int group_idx =
        config.group_col.empty() ? -1 : require_col(config.group_col, "group");

    std::vector<int> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const int idx = static_cast<int>(i);
        if (idx == label_idx || idx == subset_idx || idx == group_idx) continue;
        feature_cols.push_back(idx);
        feature_names.push_back(header[i]);
    }
    if (feature_cols.empty()) throw std::runtime_error(path + ": no feature columns");
    if (rows.size() < 2) throw std::runtime_error(path + ": zero data rows");

    const std::size_t n = rows.size() - 1;
    const std::size_t p = feature_cols.size();
    Matrix features(n, p);
    std::vector<std::string> labels_raw(n);
    std::vector<std::string> subsets_raw(n);
    std::vector<std::string> groups_raw(group_idx >= 0 ? n : 0);

    std::vector<std::string> errors;
    const auto report = [&](std::size_t line_no, const std::string& what) {
        if (errors.size() < 20) {
            errors.push_back(path + ": line " + std::to_string(line_no) + ": " + what);
        }
    };

    for (std::size_t r = 0; r < n; ++r) {
        const std::vector<std::string>& cells = rows[r + 1];
        const std::size_t line_no = r + 2;  // header is line 1
        if (cells.size() != header.size()) {
            report(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(cells.size()));
            continue;
        }
        if (cells[static_cast<std::size_t>(label_idx)].empty()) {
            report(line_no, "empty label");
        }
        if (cells[static_cast<std::size_t>(subset_idx)].empty()) {
            report(line_no, "empty subset");
        }
        if (group_idx >= 0) {
            if (cells[static_cast<std::size_t>(group_idx)].empty()) {
                report(line_no, "empty group");
            } else {
                groups_raw[r] = cells[static_cast<std::size_t>(group_idx)];
            }
        }
        labels_raw[r] = cells[static_cast<std::size_t>(label_idx)];
        subsets_raw[r] = cells[static_cast<std::size_t>(subset_idx)];
        for (std::size_t j = 0; j < p; ++j) {
            const std::string& cell = cells[static_cast<std::size_t>(feature_cols[j])];
            bool ok = false;
            const double value = csv::parse_double(cell, ok);
            if (!ok) {
                report(line_no, "column '" + feature_names[j] + "': cannot parse '" + cell +
                                    "' as a number");
            } else if (!std::isfinite(value)) {
                report(line_no, "column '" + feature_names[j] + "': non-finite feature value");
            } else {
                features(r, j) = value;
            }
        }
    }
    if (!errors.empty()) {
        std::string msg = "CSV rejected with " + std::to_string(errors.size()) +
                          " error(s):";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }

    // lexicographic name -> index mappings keep runs reproducible no matter
    // the row order of the file
    const auto index_of = [](const std::vector<std::string>& raw,
                             std::vector<std::string>& names, std::vector<int>& out) {
        names.assign(raw.begin(), raw.end());
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        out.resize(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = static_cast<int>(
                std::lower_bound(names.begin(), names.end(), raw[i]) - names.begin());
        }
    };

    Dataset dataset;
    dataset.name = fs::path(path).stem().string();
    dataset.features = std::move(features);
    index_of(labels_raw, dataset.class_names, dataset.labels);
    index_of(subsets_raw, dataset.subset_names, dataset.subsets);
    if (group_idx >= 0) {
        std::vector<std::string> group_names;
        index_of(groups_raw, group_names, dataset.groups);
    }
    require_valid(dataset);
    return dataset;
}

int cmd_meta(const RunConfig& config, std::ostream& out) {
    if (config.data_paths.empty()) throw std::invalid_argument("no data files given");
    std::string text = "data,rows,features,classes,class_imbalance,subsets,subset_imbalance\n";
    for (const std::string& path : config.data_paths) {
        const Dataset dataset = load_csv(path, config);
        const MetaSummary meta = meta_summary(dataset);
        text += dataset.name;
        text += ',' + std::to_string(meta.rows);
        text += ',' + std::to_string(meta.features);
        text += ',' + std::to_string(meta.classes);
        text += ',' + csv::format_fixed(meta.class_imbalance, 1);
        text += ',' + std::to_string(meta.subsets);
        text += ',' + csv::format_fixed(meta.subset_imbalance, 1);
        text += '\n';
    }
    out << text;
    return 0;
}

int cmd_run(const RunConfig& config, std::ostream& log) {
    if (config.data_paths.empty()) throw std::invalid_argument("no data files given");
    if (config.learners.empty()) throw std::invalid_argument("learner list is empty");
    if (config.policies.empty()) throw std::invalid_argument("policy list is empty");
    if (config.folds < 2) throw std::invalid_argument("--folds must be >= 2");
    if (config.workers < 1) throw std::invalid_argument("--workers must be >= 1");
    if (!config.folds_file.empty() && config.data_paths.size() != 1) {
        throw std::invalid_argument("--folds-file replay needs exactly one data file");
    }

    std::vector<Dataset> datasets;
    datasets.reserve(config.data_paths.size());
    for (const std::string& path : config.data_paths) {
        datasets.push_back(load_csv(path, config));
        log << "loaded " << datasets.back().name << ": " << datasets.back().n_rows()
            << " rows, " << datasets.back().n_features() << " features, "
            << datasets.back().n_classes() << " classes, " << datasets.back().n_subsets()
            << " subsets\n";
    }

    std::vector<const Dataset*> pointers;
    std::map<std::string, const Dataset*> by_name;
    for (const Dataset& ds : datasets) {
        pointers.push_back(&ds);
        by_name[ds.name] = &ds;
    }

    RunManifest manifest =
        plan(pointers, config.learners, config.folds, config.seed, config.policies);

    fs::create_directories(config.out_dir);
    const std::string manifest_path = (fs::path(config.out_dir) / "manifest.json").string();
    manifest.save(manifest_path);
    log << "planned " << manifest.jobs.size() << " jobs -> " << manifest_path << '\n';

    ExecuteOptions options;
    options.workers = config.workers;
    options.results_path = (fs::path(config.out_dir) / "records.ndjson").string();
    options.max_jobs = config.max_jobs;
    if (!config.folds_file.empty()) {
        FoldAssignment fa = import_folds_csv(config.folds_file, datasets.front().n_rows());
        if (fa.k != config.folds) {
            throw std::invalid_argument("folds file has k=" + std::to_string(fa.k) +
                                        " but --folds is " + std::to_string(config.folds));
        }
        options.fold_overrides[datasets.front().name] = std::move(fa);
        log << "replaying folds from " << config.folds_file << '\n';
    }

    const ExecuteOutcome outcome = execute(manifest, by_name, options);
    manifest.save(manifest_path);

    // fit_seconds stays out of the CSVs: wall time would break the
    // byte-identical reproducibility contract. It lives in records.ndjson.
    std::string records_csv = "data,learner,subset,fold,policy,test_error,n_train,n_test\n";
    for (const EvalRecord& r : outcome.records) {
        records_csv += r.dataset;
        records_csv += ',';
        records_csv += r.learner;
        records_csv += ',' + csv::escape(r.subset);
        records_csv += ',' + std::to_string(r.fold);
        records_csv += ',';
        records_csv += to_string(r.policy);
        records_csv += ',' + csv::format_double(r.test_error);
        records_csv += ',' + std::to_string(r.n_train);
        records_csv += ',' + std::to_string(r.n_test);
        records_csv += '\n';
    }
    write_text_file((fs::path(config.out_dir) / "records.csv").string(), records_csv);

    std::vector<SubsetComparison> comparisons;
    for (const std::string& name : manifest.dataset_names) {
        for (const LearnerKind learner : manifest.learners) {
            std::vector<EvalRecord> group;
            for (const EvalRecord& r : outcome.records) {
                if (r.dataset == name && r.learner == to_string(learner)) group.push_back(r);
            }
            if (group.empty()) continue;
            CompareResult result = soak_compare(group);
            for (const std::string& notice : result.notices) log << "note: " << notice << '\n';
            comparisons.insert(comparisons.end(), result.comparisons.begin(),
                               result.comparisons.end());
        }
    }

    std::string comp_csv = "data,learner,subset,comparison,mean_diff,p_value,log10_p,K_used\n";
    nlohmann::json comp_json = nlohmann::json::array();
    for (const SubsetComparison& c : comparisons) {
        comp_csv += c.dataset;
        comp_csv += ',';
        comp_csv += c.learner;
        comp_csv += ',' + csv::escape(c.subset);
        comp_csv += ',';
        comp_csv += to_string(c.kind);
        comp_csv += ',' + csv::format_fixed(c.mean_diff, 1);
        comp_csv += ',' + fmt_sig(c.p_value, 3);
        comp_csv += ',' + csv::format_fixed(log10_clamped(c.p_value), 1);
        comp_csv += ',' + std::to_string(c.k_used);
        comp_csv += '\n';

        nlohmann::json entry;
        entry["data"] = c.dataset;
        entry["learner"] = c.learner;
        entry["subset"] = c.subset;
        entry["comparison"] = std::string(to_string(c.kind));
        entry["mean_diff"] = c.mean_diff;
        entry["t_stat"] = c.t_stat;
        entry["p_value"] = c.p_value;
        entry["log10_p"] = log10_clamped(c.p_value);
        entry["K_used"] = c.k_used;
        comp_json.push_back(std::move(entry));
    }
    write_text_file((fs::path(config.out_dir) / "comparisons.csv").string(), comp_csv);
    write_text_file((fs::path(config.out_dir) / "comparisons.json").string(),
                    comp_json.dump(2) + "\n");

    std::string summary_csv =
        "data,learner,comparison,min_diff,max_diff,min_log10p,max_log10p,category\n";
    for (const std::string& name : manifest.dataset_names) {
        for (const LearnerKind learner : manifest.learners) {
            for (const ComparisonKind kind :
                 {ComparisonKind::OtherVsSame, ComparisonKind::AllVsSame}) {
                std::vector<SubsetComparison> group;
                for (const SubsetComparison& c : comparisons) {
                    if (c.dataset == name && c.learner == to_string(learner) && c.kind == kind) {
                        group.push_back(c);
                    }
                }
                if (group.empty()) continue;
                const DatasetSummary s = summarize_dataset(group);
                summary_csv += s.dataset;
                summary_csv += ',';
                summary_csv += s.learner;
                summary_csv += ',';
                summary_csv += to_string(s.kind);
                summary_csv += ',' + csv::format_fixed(s.min_diff, 1);
                summary_csv += ',' + csv::format_fixed(s.max_diff, 1);
                summary_csv += ',' + csv::format_fixed(s.min_log10p, 1);
                summary_csv += ',' + csv::format_fixed(s.max_log10p, 1);
                summary_csv += ',' + s.category;
                summary_csv += '\n';
            }
        }
    }
    write_text_file((fs::path(config.out_dir) / "summary.csv").string(), summary_csv);

    std::string stats_csv = "data,learner,subset,policy,folds,mean_error,sd_error\n";
    for (const ErrorStats& s : error_stat_table(outcome.records)) {
        stats_csv += s.dataset;
        stats_csv += ',';
        stats_csv += s.learner;
        stats_csv += ',' + csv::escape(s.subset);
        stats_csv += ',';
        stats_csv += to_string(s.policy);
        stats_csv += ',' + std::to_string(s.folds);
        stats_csv += ',' + csv::format_double(s.mean_error);
        stats_csv += ',' + csv::format_double(s.sd_error);
        stats_csv += '\n';
    }
    write_text_file((fs::path(config.out_dir) / "error_stats.csv").string(), stats_csv);

    log << "jobs: " << outcome.done << " done, " << outcome.skipped << " skipped, "
        << outcome.failed << " failed, " << outcome.remaining << " remaining\n";
    for (const Job& job : manifest.jobs) {
        if (job.status == JobStatus::Failed) {
            log << "failed " << job.job_id << " (" << job.dataset << ", "
                << to_string(job.learner) << ", subset " << job.test_subset << ", fold "
                << job.test_fold << ", " << to_string(job.policy) << "): " << job.message
                << '\n';
        }
    }
    return outcome.failed == 0 ? 0 : 1;
}

int cmd_plot(const std::string& run_dir, std::ostream& log) {
    const std::string comp_path = (fs::path(run_dir) / "comparisons.csv").string();
    const auto rows = csv::read_file(comp_path);
    if (rows.empty() || rows.front() !=
            std::vector<std::string>{"data", "learner", "subset", "comparison", "mean_diff",
                                     "p_value", "log10_p", "K_used"}) {
        throw std::runtime_error(comp_path + ": not a comparisons table");
    }

    std::vector<SubsetComparison> comparisons;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != 8) {
            throw std::runtime_error(comp_path + ": malformed row " + std::to_string(r + 1));
        }
        SubsetComparison c;
        c.dataset = cells[0];
        c.learner = cells[1];
        c.subset = cells[2];
        const auto kind = parse_comparison(cells[3]);
        if (!kind) throw std::runtime_error(comp_path + ": unknown comparison " + cells[3]);
        c.kind = *kind;
        bool ok1 = false;
        bool ok2 = false;
        c.mean_diff = csv::parse_double(cells[4], ok1);
        c.p_value = csv::parse_double(cells[5], ok2);
        bool ok3 = false;
        c.k_used = static_cast<int>(csv::parse_double(cells[7], ok3));
        if (!ok1 || !ok2 || !ok3) {
            throw std::runtime_error(comp_path + ": malformed row " + std::to_string(r + 1));
        }
        comparisons.push_back(std::move(c));
    }

    if (comparisons.empty()) {
        log << "nothing to plot: no comparison rows in " << comp_path << '\n';
        return 1;
    }

    const std::string comp_svg = (fs::path(run_dir) / "plot_comparisons.svg").string();
    write_text_file(comp_svg, render_comparison_svg(comparisons));
    log << "wrote " << comp_svg << '\n';

    const std::string stats_path = (fs::path(run_dir) / "error_stats.csv").string();
    const auto stat_rows = csv::read_file(stats_path);
    std::vector<ErrorStats> stats;
    for (std::size_t r = 1; r < stat_rows.size(); ++r) {
        const auto& cells = stat_rows[r];
        if (cells.size() != 7) {
            throw std::runtime_error(stats_path + ": malformed row " + std::to_string(r + 1));
        }
        ErrorStats s;
        s.dataset = cells[0];
        s.learner = cells[1];
        s.subset = cells[2];
        const auto policy = parse_policy(cells[3]);
        if (!policy) throw std::runtime_error(stats_path + ": unknown policy " + cells[3]);
        s.policy = *policy;
        bool ok1 = false;
        bool ok2 = false;
        bool ok3 = false;
        s.folds = static_cast<int>(csv::parse_double(cells[4], ok1));
        s.mean_error = csv::parse_double(cells[5], ok2);
        s.sd_error = csv::parse_double(cells[6], ok3);
        if (!ok1 || !ok2 || !ok3) {
            throw std::runtime_error(stats_path + ": malformed row " + std::to_string(r + 1));
        }
        stats.push_back(std::move(s));
    }
    if (!stats.empty()) {
        const std::string stats_svg = (fs::path(run_dir) / "plot_error_stats.svg").string();
        write_text_file(stats_svg, render_error_stats_svg(stats));
        log << "wrote " << stats_svg << '\n';
    }
    return 0;
}

int cmd_folds_export(const RunConfig& config, const std::string& out_path,
                     std::ostream& log) {
    if (config.data_paths.size() != 1) {
        throw std::invalid_argument("folds export needs exactly one data file");
    }
    const Dataset dataset = load_csv(config.data_paths.front(), config);
    const FoldAssignment fa = assign_folds(dataset, config.folds, config.seed);
    for (const std::string& w : fa.warnings) log << "warning: " << w << '\n';
    export_folds_csv(fa, out_path);
    log << "wrote " << out_path << " (rows=" << fa.folds.size() << ", k=" << fa.k << ")\n";
    return 0;
}

int cmd_folds_import(const RunConfig& config, const std::string& in_path,
                     std::ostream& log) {
    if (config.data_paths.size() != 1) {
        throw std::invalid_argument("folds import needs exactly one data file");
    }
    const Dataset dataset = load_csv(config.data_paths.front(), config);
    const FoldAssignment fa = import_folds_csv(in_path, dataset.n_rows());
    std::vector<std::size_t> sizes(static_cast<std::size_t>(fa.k) + 1, 0);
    for (const int f : fa.folds) ++sizes[static_cast<std::size_t>(f)];
    log << "folds file " << in_path << " covers " << dataset.n_rows() << " rows with k="
        << fa.k << '\n';
    for (int f = 1; f <= fa.k; ++f) {
        log << "  fold " << f << ": " << sizes[static_cast<std::size_t>(f)] << " rows\n";
    }
    return 0;
}

}  // namespace soak
