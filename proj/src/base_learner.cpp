#include "pboost/base_learner.hpp"

#include <algorithm>

#include "pboost/error.hpp"

namespace pboost {

SvmLearner::SvmLearner(LearnerConfig cfg, std::optional<double> fixed_kappa)
    : cfg_(cfg), fixed_kappa_(fixed_kappa) {
    cfg_.validate();
}

std::shared_ptr<const Classifier> SvmLearner::train(const Dataset& training, RngStream) const {
    training.require_both_classes();
    double kappa = fixed_kappa_ ? *fixed_kappa_ : rbf_kappa_heuristic(training.features());
    return std::make_shared<SvmModel>(train_svm(training.features(), training.labels(), cfg_, kappa));
}

std::vector<std::size_t> weighted_resample_indices(const WeightVector& w, std::size_t n, RngStream rng) {
    std::vector<double> cumulative(w.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        total += w[i];
        cumulative[i] = total;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroWeights, "cannot resample with all-zero weights");
    std::vector<std::size_t> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            // u rounded up to the total; take the last entry with weight.
            it = std::prev(it);
            while (w[static_cast<std::size_t>(it - cumulative.begin())] <= 0.0) --it;
        }
        out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
    }
    return out;
}

Dataset weighted_resample(const Dataset& data, const WeightVector& w, std::size_t n, RngStream rng) {
    if (w.size() != data.size()) throw Error(ErrorCode::LengthMismatch, "weights vs dataset rows");
    auto idx = weighted_resample_indices(w, n, std::move(rng));
    return data.subset(idx);
}

}  // namespace pboost
