#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pboost/dataset.hpp"

namespace pboost {

struct KeelOptions {
    /// Class token mapped to +1, matched case-insensitively after trimming.
    std::string positive_token = "positive";
    /// Skip nominal input attributes instead of failing on them.
    bool drop_nominal = false;
};

/// KEEL .dat: @relation / @attribute / @inputs / @outputs / @data header,
/// comma-separated rows with the class last. Attribute ranges are ignored.
/// Throws MalformedHeader, NonNumericAttribute, MoreThanTwoClasses,
/// MalformedData (also for '?' missing values) or IoError.
Dataset parse_keel(std::istream& in, const KeelOptions& options = {});
Dataset parse_keel(const std::filesystem::path& path, const KeelOptions& options = {});

/// CSV with a header row: feature columns, an optional "group" column, and
/// the label in the last column. Labels equal to positive_token
/// (case-insensitive), "1" or "+1" are positive; everything else negative.
Dataset parse_csv(std::istream& in, const std::string& positive_token = "positive");
Dataset parse_csv(const std::filesystem::path& path, const std::string& positive_token = "positive");

enum class DataFormat { Keel, Csv };

struct DatasetManifest {
    std::string name;
    std::filesystem::path path;
    std::string positive_label_token = "positive";
    std::optional<double> expected_lambda;
    DataFormat format = DataFormat::Keel;
    bool drop_nominal = false;

    /// Throws ConfigError.
    void validate() const;
    Dataset load() const;
};

/// Manifest file as JSON (an array of objects, or {"datasets": [...]}) or
/// key=value lines grouped under "[name]" section headers. Relative paths
/// resolve against the manifest's directory. Throws ConfigError or IoError.
std::vector<DatasetManifest> read_manifest(const std::filesystem::path& path);

/// Stratified 2x5-fold protocol: the data is halved per class, each half is
/// cut into 5 folds (4 train, 1 validation) with the other half as test,
/// and the halves swap roles for 10 replications. Throws TooFewSamples.
std::vector<Replication> make_2x5_folds(const Dataset& data, std::uint64_t seed);

}  // namespace pboost
