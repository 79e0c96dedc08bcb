#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pboost/dataset.hpp"
#include "pboost/rng.hpp"

namespace pboost {

/// 2-D generator: a N((0,0), I) positive blob and t_neg unit-variance negative
/// clusters whose means sit at distance >= delta from the origin.
struct SynthConfig {
    double delta = 0.2;
    std::size_t t_neg = 100;
    std::size_t per_cluster = 100;
    double lambda_train = 50.0;
    std::vector<double> lambda_tests{100.0};
    std::uint64_t seed = 0;
    /// Cluster-mean radius is uniform in [delta, delta + outer_span].
    double outer_span = 3.0;

    /// Throws InvalidArgument.
    void validate() const;
};

/// per_cluster positives (group kNoGroup) followed by t_neg blocks of
/// per_cluster negatives whose group id is the cluster index.
Dataset gen_synthetic(const SynthConfig& cfg);

/// Cluster means in group-id order.
std::vector<std::vector<double>> synthetic_cluster_means(const SynthConfig& cfg);

/// D1 (lambda_train 50, delta 0.2), D2 (50, 0.1), D3 (20, 0.2).
/// Throws UnknownSetting.
SynthConfig make_setting(std::string_view name);

/// Ten replications: every group (positives and each cluster) is halved at
/// random into design and test parts; the design part is cut into 5 folds,
/// one for validation and four for training, and the halves then swap roles.
/// Training keeps the positives and the first round(lambda_train) clusters;
/// validation and test keep every group.
std::vector<Replication> make_synthetic_replications(const Dataset& data, const SynthConfig& cfg);

/// Writes the CSV layout read by parse_csv.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace pboost
