#pragma once

#include <memory>
#include <optional>

#include "pboost/dataset.hpp"
#include "pboost/rng.hpp"
#include "pboost/svm.hpp"

namespace pboost {

/// Builds a classifier from an (already resampled) training set. The boosting
/// engines are written against this interface so the base model can be
/// swapped, e.g. for the trivial always-positive classifier.
class Learner {
public:
    virtual ~Learner() = default;
    virtual std::shared_ptr<const Classifier> train(const Dataset& training, RngStream rng) const = 0;
};

/// RBF SVM; kappa comes from rbf_kappa_heuristic on each training set unless
/// fixed.
class SvmLearner final : public Learner {
public:
    explicit SvmLearner(LearnerConfig cfg = {}, std::optional<double> fixed_kappa = std::nullopt);

    std::shared_ptr<const Classifier> train(const Dataset& training, RngStream rng) const override;

    const LearnerConfig& config() const noexcept { return cfg_; }

private:
    LearnerConfig cfg_;
    std::optional<double> fixed_kappa_;
};

/// Predicts one class everywhere with decision value +1 or -1.
class ConstantClassifier final : public Classifier {
public:
    explicit ConstantClassifier(Label label) : label_(label) {}
    double decision_value(std::span<const double>) const override { return to_int(label_); }
    std::size_t n_sv() const override { return 0; }
    std::string_view kind() const override { return "constant"; }
    Label label() const noexcept { return label_; }

private:
    Label label_;
};

class ConstantLearner final : public Learner {
public:
    explicit ConstantLearner(Label label) : label_(label) {}
    std::shared_ptr<const Classifier> train(const Dataset&, RngStream) const override {
        return std::make_shared<ConstantClassifier>(label_);
    }

private:
    Label label_;
};

/// n rows drawn with replacement, row i with probability w[i] / sum(w).
/// Throws AllZeroWeights.
Dataset weighted_resample(const Dataset& data, const WeightVector& w, std::size_t n, RngStream rng);

/// Index form of weighted_resample.
std::vector<std::size_t> weighted_resample_indices(const WeightVector& w, std::size_t n, RngStream rng);

}  // namespace pboost
