#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pboost/matrix.hpp"
#include "pboost/rng.hpp"

namespace pboost {

enum class Label : std::int8_t { Negative = -1, Positive = 1 };

constexpr int to_int(Label label) noexcept { return static_cast<int>(label); }
constexpr Label label_from_sign(double value) noexcept {
    return value >= 0.0 ? Label::Positive : Label::Negative;
}

/// Group id carried by samples that belong to no a-priori group (positives
/// of the synthetic generator).
inline constexpr std::int64_t kNoGroup = -1;

/// Labeled feature records with optional a-priori group tags.
class Dataset {
public:
    Dataset() = default;
    /// Throws LengthMismatch or MalformedData when the invariants do not hold.
    Dataset(Matrix features, std::vector<Label> labels,
            std::optional<std::vector<std::int64_t>> group_ids = std::nullopt);

    const Matrix& features() const noexcept { return features_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    const std::optional<std::vector<std::int64_t>>& group_ids() const noexcept { return group_ids_; }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dims() const noexcept { return features_.cols(); }
    std::size_t m_pos() const noexcept { return m_pos_; }
    std::size_t m_neg() const noexcept { return labels_.size() - m_pos_; }
    /// Imbalance ratio M-/M+; infinite when there are no positives.
    double lambda() const noexcept;

    std::span<const double> row(std::size_t i) const noexcept { return features_.row(i); }
    Label label(std::size_t i) const noexcept { return labels_[i]; }

    std::vector<std::size_t> positive_indices() const;
    std::vector<std::size_t> negative_indices() const;

    Dataset subset(std::span<const std::size_t> indices) const;

    /// Throws SingleClassInput unless both classes are present.
    void require_both_classes() const;

private:
    Matrix features_;
    std::vector<Label> labels_;
    std::optional<std::vector<std::int64_t>> group_ids_;
    std::size_t m_pos_ = 0;
};

/// Nonnegative per-sample importance weights.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<double> values);
    static WeightVector uniform(std::size_t n);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }
    double sum() const noexcept;

    void push_back(double w);

private:
    std::vector<double> values_;
};

/// Rescales to unit sum, preserving ratios. Throws AllZeroWeights.
WeightVector normalize_weights(const WeightVector& w);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> held_out;
};

/// Row indices of one train/validation/test replication.
struct Replication {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Stratified k-fold split. Within each class the indices are shuffled and cut
/// into k contiguous chunks; remainders go to the lowest-indexed folds.
/// Index lists in each Fold are sorted ascending.
std::vector<Fold> stratified_kfold(const Dataset& data, std::size_t k, RngStream rng);

/// Keeps every positive and round(m_pos * lambda_target) negatives drawn
/// uniformly without replacement. Throws InsufficientNegatives.
Dataset subsample_to_skew(const Dataset& data, double lambda_target, RngStream rng);

/// Same selection as subsample_to_skew, returned as sorted row indices.
std::vector<std::size_t> subsample_to_skew_indices(const Dataset& data, double lambda_target,
                                                   RngStream rng);

std::size_t round_half_up(double value) noexcept;

}  // namespace pboost
