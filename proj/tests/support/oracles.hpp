#pragma once

// Reference implementations used only by tests. Each is written from the
// definitions, shares no code with the library, and favors clarity over speed.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "pboost/base_learner.hpp"
#include "pboost/dataset.hpp"
#include "pboost/matrix.hpp"

namespace oracle {

/// AUPR by enumerating every distinct score as a cut (score >= cut), keeping
/// cuts with at least one true positive, anchoring recall 0 at the first
/// precision and integrating with trapezoids.
double brute_force_aupr(const std::vector<double>& scores, const std::vector<int>& labels);

/// Best F_beta over every cut that can change a prediction, computed by
/// recounting the confusion matrix from scratch at each cut.
double brute_force_best_fbeta(const std::vector<double>& scores, const std::vector<int>& labels, double beta);

struct DualSolution {
    std::vector<double> alpha;
    double objective = 0.0;
    double bias = 0.0;
    std::vector<int> train_predictions;
};

/// Exhaustive search over the SVM dual on a grid of the given step, for up to
/// 4 samples: maximize sum(a) - 1/2 sum a_i a_j y_i y_j K_ij with 0 <= a <= C
/// and sum a_i y_i = 0 (the last multiplier is solved from the equality).
DualSolution grid_search_svm_dual(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double c,
                                  double kappa, double step = 0.01);

/// Dunn index straight from the definition with sqrt distances.
double brute_force_dunn(const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& assign);

/// Classifier whose prediction for a row is looked up by its first feature.
class TableClassifier final : public pboost::Classifier {
public:
    explicit TableClassifier(std::map<double, int> table) : table_(std::move(table)) {}
    double decision_value(std::span<const double> x) const override { return table_.at(x[0]); }
    std::size_t n_sv() const override { return 1; }
    std::string_view kind() const override { return "table"; }

private:
    std::map<double, int> table_;
};

/// Learner that hands out a fixed sequence of classifiers, one per call.
class ScriptedLearner final : public pboost::Learner {
public:
    explicit ScriptedLearner(std::vector<std::shared_ptr<const pboost::Classifier>> script)
        : script_(std::move(script)) {}
    std::shared_ptr<const pboost::Classifier> train(const pboost::Dataset&, pboost::RngStream) const override {
        return script_.at(calls_++ % script_.size());
    }
    std::size_t calls() const { return calls_; }

private:
    std::vector<std::shared_ptr<const pboost::Classifier>> script_;
    mutable std::size_t calls_ = 0;
};

/// Labels as +1/-1 ints.
std::vector<int> as_ints(const std::vector<pboost::Label>& labels);

}  // namespace oracle
