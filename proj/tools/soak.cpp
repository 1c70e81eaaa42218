#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "soak/cli.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::vector<std::string> data;
    std::string label_col;
    std::string subset_col;
    std::string group_col;
    int folds = 10;
    std::uint64_t seed = 0;
    std::string learners;
    std::string policies;
    int workers = 1;
    std::string out = "soak_out";
    std::string folds_file;
    std::size_t max_jobs = 0;
};

void add_common_options(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "JSON config file mirroring the flags; explicit flags override it");
    cmd->add_option("--data", flags.data, "CSV data file(s)");
    cmd->add_option("--label-col", flags.label_col, "name of the class label column");
    cmd->add_option("--subset-col", flags.subset_col, "name of the subset column");
    cmd->add_option("--group-col", flags.group_col,
                    "name of the group column (rows in a group share a fold)");
    cmd->add_option("--folds", flags.folds, "number of cross-validation folds K")
        ->check(CLI::Range(2, 10000));
    cmd->add_option("--seed", flags.seed, "run seed");
    cmd->add_option("--learners", flags.learners,
                    "comma list of featureless, knn, l1_logistic");
    cmd->add_option("--policies", flags.policies, "comma list of same, other, all");
    cmd->add_option("--workers", flags.workers, "parallel job workers")
        ->check(CLI::Range(1, 1024));
    cmd->add_option("--out", flags.out, "output directory (run dir for plot)");
    cmd->add_option("--folds-file", flags.folds_file,
                    "replay a fold assignment exported by `folds export`");
    cmd->add_option("--max-jobs", flags.max_jobs,
                    "stop after this many jobs (resume testing hook)");
}

soak::RunConfig merge_config(const CLI::App* cmd, const Flags& flags) {
    soak::RunConfig config;
    if (cmd->count("--config") > 0) config = soak::config_from_json_file(flags.config_path);
    if (cmd->count("--data") > 0) config.data_paths = flags.data;
    if (cmd->count("--label-col") > 0) config.label_col = flags.label_col;
    if (cmd->count("--subset-col") > 0) config.subset_col = flags.subset_col;
    if (cmd->count("--group-col") > 0) config.group_col = flags.group_col;
    if (cmd->count("--folds") > 0) config.folds = flags.folds;
    if (cmd->count("--seed") > 0) config.seed = flags.seed;
    if (cmd->count("--learners") > 0) config.learners = soak::parse_learner_list(flags.learners);
    if (cmd->count("--policies") > 0) config.policies = soak::parse_policy_list(flags.policies);
    if (cmd->count("--workers") > 0) config.workers = flags.workers;
    if (cmd->count("--out") > 0) config.out_dir = flags.out;
    if (cmd->count("--folds-file") > 0) config.folds_file = flags.folds_file;
    if (cmd->count("--max-jobs") > 0) config.max_jobs = flags.max_jobs;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "SOAK: same/other/all k-fold cross-validation over named data subsets.\n"
        "Diagnoses whether models trained on one subset transfer to another."};
    app.require_subcommand(1);
    Flags flags;
    std::string folds_csv;
    int rc = 0;

    CLI::App* meta =
        app.add_subcommand("meta", "print a metadata summary CSV, one row per data file");
    add_common_options(meta, flags);
    meta->callback([&] { rc = soak::cmd_meta(merge_config(meta, flags), std::cout); });

    CLI::App* run = app.add_subcommand(
        "run", "run the full analysis and write tables under the output directory");
    add_common_options(run, flags);
    run->callback([&] { rc = soak::cmd_run(merge_config(run, flags), std::cout); });

    CLI::App* plot = app.add_subcommand(
        "plot", "render SVG figures from a run output directory (--out)");
    add_common_options(plot, flags);
    plot->callback([&] {
        const soak::RunConfig config = merge_config(plot, flags);
        rc = soak::cmd_plot(config.out_dir, std::cout);
        if (rc != 0) std::exit(rc);  // "nothing to plot" is an error exit
    });

    CLI::App* folds = app.add_subcommand("folds", "export or import fold assignments");
    folds->require_subcommand(1);
    CLI::App* folds_export = folds->add_subcommand(
        "export", "write the deterministic fold assignment for a data file as CSV");
    add_common_options(folds_export, flags);
    folds_export->add_option("--file", folds_csv, "fold CSV to write")->required();
    folds_export->callback([&] {
        rc = soak::cmd_folds_export(merge_config(folds_export, flags), folds_csv, std::cout);
    });
    CLI::App* folds_import = folds->add_subcommand(
        "import", "validate a fold CSV against a data file and print fold sizes");
    add_common_options(folds_import, flags);
    folds_import->add_option("--file", folds_csv, "fold CSV to read")->required();
    folds_import->callback([&] {
        rc = soak::cmd_folds_import(merge_config(folds_import, flags), folds_csv, std::cout);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
