#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pboost/dataset.hpp"
#include "pboost/matrix.hpp"
#include "pboost/rng.hpp"

namespace pboost {

/// n distinct elements of `indices`, uniform without replacement, returned
/// sorted. Throws SubsetTooLarge.
std::vector<std::size_t> rus(std::span<const std::size_t> indices, std::size_t n, RngStream rng);

/// n positions out of w.size() drawn without replacement with inclusion
/// probability proportional to weight (capped at 1), using systematic
/// sampling over a shuffled order. Returned sorted. Zero-weight entries are
/// only taken when fewer than n entries carry weight.
std::vector<std::size_t> weighted_sample_without_replacement(const WeightVector& w, std::size_t n,
                                                             RngStream rng);

/// SMOTE: each synthetic row is x + u (x_nn - x) for a base row x, one of its
/// k nearest neighbours x_nn among `minority`, and u ~ U(0, 1). Base rows are
/// taken round-robin over a shuffled order. Throws TooFewPositives when fewer
/// than two rows are available and n_new > 0.
Matrix smote(const Matrix& minority, std::size_t n_new, std::size_t k_neighbors, RngStream rng);

/// Disjoint parts over the negatives. Indices are positions within the
/// negative subset (0 .. M- - 1), not dataset rows.
struct Partitioning {
    std::vector<std::vector<std::size_t>> parts;

    std::size_t count() const noexcept { return parts.size(); }
    std::vector<std::size_t> sizes() const;
    std::size_t total() const noexcept;
    /// Throws InvalidArgument unless the parts are nonempty, disjoint and
    /// cover 0 .. n_negatives - 1.
    void validate(std::size_t n_negatives) const;
};

/// Random partitioning without replacement over a uniform shuffle. Every part
/// size lies in [ceil(M+/2), 2 M+] and the sizes sum to neg_count: while more
/// than 2 M+ negatives remain, a size is drawn uniformly from
/// [ceil(M+/2), min(2 M+, remaining - ceil(M+/2))]; the rest forms the last
/// part. Throws TooFewNegatives when neg_count < ceil(M+/2).
Partitioning partition_ruswr(std::size_t neg_count, std::size_t m_pos, RngStream rng);

struct KMeansResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    std::size_t k = 0;
    std::size_t iterations = 0;
    /// Within-cluster sum of squares after each assignment step.
    std::vector<double> objective_trace;
};

/// Lloyd's algorithm from greedy farthest-point seeding (random first
/// centroid). Stops at an assignment fixpoint or after 300 iterations; empty
/// clusters are re-seeded from the point farthest from its centroid.
/// Throws TooManyClusters when k exceeds the number of distinct rows.
KMeansResult kmeans(const Matrix& features, std::size_t k, RngStream rng);

std::size_t count_distinct_rows(const Matrix& features);

/// Minimum single-linkage distance between clusters over the maximum cluster
/// diameter; +inf when every cluster has zero diameter. Throws SingleCluster.
double dunn_index(const Matrix& features, std::span<const std::size_t> assignments);

struct CusResult {
    Partitioning partitioning;
    std::size_t chosen_k = 0;
    /// Dunn index per candidate, aligned with the k_range passed in.
    std::vector<double> dunn;
};

/// Clusters the negatives for every k in k_range and keeps the clustering
/// with the largest Dunn index (smallest k on ties).
CusResult partition_cus(const Matrix& neg_features, std::span<const std::size_t> k_range, RngStream rng);

/// 2 .. min(20, floor(M-/2)), further capped at the number of distinct rows.
std::vector<std::size_t> default_k_range(const Matrix& neg_features);

/// One part per distinct group id, in ascending id order. Throws
/// MissingGroupIds if any id is negative.
Partitioning partition_apriori(std::span<const std::int64_t> negative_group_ids);
/// Uses the group ids of the dataset's negatives; throws MissingGroupIds
/// when the dataset carries none.
Partitioning partition_apriori(const Dataset& data);

struct BalancedSample {
    Dataset data;
    /// Source row in the input for each output row; nullopt for synthetic rows.
    std::vector<std::optional<std::size_t>> origin;
};

/// Random balance: draws a positive count p uniformly from [2, M-2], then
/// shrinks the class above its target with rus and grows the other with
/// smote so the output keeps M rows.
Dataset random_balance(const Dataset& data, RngStream rng, std::size_t k_neighbors = 5);
BalancedSample random_balance_traced(const Dataset& data, RngStream rng, std::size_t k_neighbors = 5);
/// Random balance with a fixed positive target.
BalancedSample random_balance_to(const Dataset& data, std::size_t target_pos, RngStream rng,
                                 std::size_t k_neighbors = 5);

/// CSV "negative_index,part" with one row per negative. When
/// negative_rows is given, indices are mapped to dataset rows.
void write_partitioning_csv(std::ostream& out, const Partitioning& p,
                            std::span<const std::size_t> negative_rows = {});

}  // namespace pboost
