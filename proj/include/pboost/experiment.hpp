#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pboost/boosting.hpp"
#include "pboost/datagen.hpp"
#include "pboost/ingestion.hpp"
#include "pboost/svm.hpp"

namespace pboost {

enum class VariantBase { Ada, Smt, Rus, Rb, Prus, Pcus, Pa };

/// A boosting scheme plus its loss: "RUS" uses the weighted error, "RUS-F"
/// the F_beta loss.
struct VariantSpec {
    VariantBase base = VariantBase::Ada;
    bool fbeta = false;

    std::string name() const;
    /// Stable small integer used to key random streams.
    std::uint64_t id() const noexcept;
    bool partition_driven() const noexcept {
        return base == VariantBase::Prus || base == VariantBase::Pcus || base == VariantBase::Pa;
    }
    friend bool operator==(const VariantSpec&, const VariantSpec&) = default;
};

/// Throws ConfigError on unknown tokens.
VariantSpec parse_variant(std::string_view token);
std::vector<VariantSpec> parse_variant_list(std::string_view comma_separated);

enum class SourceKind { Synthetic, Keel, Csv };

struct ExperimentConfig {
    SourceKind source = SourceKind::Synthetic;
    /// Synthetic setting name (D1, D2, D3).
    std::string setting = "D1";
    std::filesystem::path manifest;
    /// Manifest entries to run; empty runs all of them.
    std::vector<std::string> datasets;
    std::filesystem::path csv;
    std::string positive_label_token = "positive";

    std::vector<VariantSpec> variants;
    /// nullopt: round(lambda_train) for baselines, partition count otherwise.
    std::optional<std::size_t> ensemble_size;
    double beta = 2.0;
    /// Test skews. Empty keeps each replication's natural skew.
    std::vector<double> lambda_tests;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "results";
    std::size_t jobs = 1;
    bool dump_models = false;
    /// Number of the 10 replications to run (the first n).
    std::size_t replications = 10;
    /// z-score features with statistics from each training set.
    bool standardize = false;

    LearnerConfig learner;
    std::size_t max_attempts = 10;

    // Synthetic generator overrides.
    std::optional<double> outer_span;
    std::optional<std::size_t> per_cluster;
    std::optional<std::size_t> t_neg;

    /// Throws ConfigError.
    void validate() const;
};

/// Reads a config as JSON (an object) or key=value lines. Throws ConfigError
/// or IoError.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one key=value setting; used by both config forms and the CLI.
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::vector<double> parse_double_list(std::string_view comma_separated);

/// One dataset with its replications, ready to run.
struct PreparedDataset {
    std::string name;
    Dataset data;
    std::vector<Replication> replications;
    /// Training skew used for the default ensemble size.
    double lambda_train = 0.0;
};

/// Loads data and builds replications. Throws data errors (MalformedHeader,
/// TooFewSamples, ...) or ConfigError.
std::vector<PreparedDataset> prepare_datasets(const ExperimentConfig& cfg);

struct RunRow {
    std::string dataset;
    std::size_t replication = 0;
    std::string variant;
    std::string lambda_label;
    double lambda_actual = 0.0;
    std::size_t members = 0;
    double threshold = 0.0;
    double f_op = 0.0;
    double f_d = 0.0;
    double g_mean = 0.0;
    double expected_cost = 0.0;
    double aupr = 0.0;
};

struct TaskResult {
    std::string dataset;
    std::size_t replication = 0;
    std::string variant;
    std::vector<RunRow> rows;
    std::vector<PrCurve> curves;
    ComplexityTotals complexity;
    std::size_t train_pos = 0;
    std::size_t train_neg = 0;
    std::optional<BoostedEnsemble> ensemble;
    std::optional<std::string> error;
};

/// Trains one variant on one replication and evaluates it on every test skew.
TaskResult run_task(const ExperimentConfig& cfg, const PreparedDataset& ds, std::size_t dataset_index,
                    std::size_t replication, const VariantSpec& variant);

struct ExperimentSummary {
    std::size_t tasks = 0;
    std::size_t failed = 0;
    std::vector<std::string> errors;
};

/// Runs every (dataset, replication, variant) task on cfg.jobs workers and
/// writes runs.csv, aggregate.csv, complexity.csv and pr/ curves (plus
/// models/ when dump_models) into cfg.out_dir. Output does not depend on the
/// worker count. Failed tasks are reported; finished rows are still written.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::vector<PreparedDataset>& data);

struct AggregateRow {
    std::string dataset;
    std::string variant;
    std::string lambda_label;
    std::size_t n = 0;
    /// metric name -> (mean, population std)
    std::map<std::string, std::pair<double, double>> stats;
};

inline const std::vector<std::string> kRunMetrics = {"f_op", "f_d", "g_mean", "expected_cost", "aupr"};

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows);

/// Writes summary.md from the CSVs in a run directory. Throws MissingResults.
void emit_reports(const std::filesystem::path& run_dir);

/// Reads a CSV written by this library into header-keyed records.
std::vector<std::map<std::string, std::string>> read_simple_csv(const std::filesystem::path& path);

/// z-scores every row with mean/std taken over train_rows (std 0 -> 1).
Dataset standardize_with(const Dataset& data, std::span<const std::size_t> train_rows);

}  // namespace pboost
