// pboost command-line runner: run experiments, summarize results, export data.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pboost/datagen.hpp"
#include "pboost/error.hpp"
#include "pboost/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int fail(int code, const std::string& msg) {
    std::cerr << "pboost: " << msg << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boosting ensembles for imbalanced classification"};
    app.require_subcommand(1);

    std::optional<std::string> config_path, out_dir, variants, lambda_tests, setting, manifest, datasets, csv,
        ensemble_size;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<std::size_t> jobs, replications;
    bool dump_models = false;
    bool standardize = false;

    auto* run = app.add_subcommand("run", "Train and evaluate the selected variants");
    run->add_option("--config", config_path, "Config file (JSON or key=value)");
    run->add_option("--seed", seed, "Root seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--variants", variants, "Comma-separated variants, e.g. RUS,PRUS-F");
    run->add_option("--lambda-tests", lambda_tests, "Comma-separated test skews, e.g. 100 or 1:100");
    run->add_option("--beta", beta, "F-measure beta");
    run->add_option("--jobs", jobs, "Worker threads");
    run->add_flag("--dump-models", dump_models, "Write every ensemble as JSON under models/");
    run->add_option("--setting", setting, "Synthetic setting D1, D2 or D3");
    run->add_option("--manifest", manifest, "KEEL dataset manifest");
    run->add_option("--datasets", datasets, "Manifest entries to run");
    run->add_option("--csv", csv, "CSV dataset");
    run->add_option("--replications", replications, "Run only the first N of the 10 replications");
    run->add_option("--ensemble-size", ensemble_size, "Ensemble size for non-partition variants, or auto");
    run->add_flag("--standardize", standardize, "z-score features on each training set");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Write summary.md for a finished run");
    report->add_option("dir", report_dir, "Run directory")->required();

    std::string gen_setting = "D1";
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Export a synthetic dataset as CSV");
    gen->add_option("--setting", gen_setting, "D1, D2 or D3");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*report) {
        try {
            pboost::emit_reports(report_dir);
            return kExitOk;
        } catch (const pboost::Error& e) {
            return fail(e.code() == pboost::ErrorCode::MissingResults ? kExitData : kExitRuntime, e.what());
        }
    }

    if (*gen) {
        try {
            auto cfg = pboost::make_setting(gen_setting);
            cfg.seed = gen_seed;
            std::ofstream out(gen_out);
            if (!out) return fail(kExitRuntime, "cannot write " + gen_out);
            pboost::write_dataset_csv(out, pboost::gen_synthetic(cfg));
            return kExitOk;
        } catch (const pboost::Error& e) {
            return fail(kExitConfig, e.what());
        }
    }

    pboost::ExperimentConfig cfg;
    try {
        if (config_path) cfg = pboost::load_config(*config_path);
        auto set = [&](const char* key, const std::optional<std::string>& v) {
            if (v) pboost::apply_config_value(cfg, key, *v);
        };
        set("setting", setting);
        if (setting) cfg.source = pboost::SourceKind::Synthetic;
        set("manifest", manifest);
        set("datasets", datasets);
        set("csv", csv);
        set("variants", variants);
        set("lambda_tests", lambda_tests);
        set("out", out_dir);
        set("ensemble_size", ensemble_size);
        if (seed) cfg.seed = *seed;
        if (beta) cfg.beta = *beta;
        if (jobs) cfg.jobs = *jobs;
        if (replications) cfg.replications = *replications;
        if (dump_models) cfg.dump_models = true;
        if (standardize) cfg.standardize = true;
        cfg.validate();
    } catch (const pboost::Error& e) {
        return fail(kExitConfig, e.what());
    }

    std::vector<pboost::PreparedDataset> data;
    try {
        data = pboost::prepare_datasets(cfg);
    } catch (const pboost::Error& e) {
        return fail(e.code() == pboost::ErrorCode::ConfigError ? kExitConfig : kExitData, e.what());
    }

    try {
        auto summary = pboost::run_experiment(cfg, data);
        pboost::emit_reports(cfg.out_dir);
        if (summary.failed > 0) {
            for (const auto& e : summary.errors) std::cerr << "pboost: " << e << '\n';
            return fail(kExitRuntime, std::to_string(summary.failed) + " of " + std::to_string(summary.tasks) +
                                          " runs failed; finished rows were written");
        }
        std::cout << "wrote " << summary.tasks << " runs to " << cfg.out_dir.string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitRuntime, e.what());
    }
}
