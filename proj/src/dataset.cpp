#include "pboost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pboost/error.hpp"

namespace pboost {

Dataset::Dataset(Matrix features, std::vector<Label> labels,
                 std::optional<std::vector<std::int64_t>> group_ids)
    : features_(std::move(features)), labels_(std::move(labels)), group_ids_(std::move(group_ids)) {
    if (features_.rows() != labels_.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(features_.rows()) + " feature rows vs " +
                        std::to_string(labels_.size()) + " labels");
    }
    if (group_ids_ && group_ids_->size() != labels_.size()) {
        throw Error(ErrorCode::LengthMismatch, "group ids do not match the number of rows");
    }
    for (double v : features_.data()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::MalformedData, "non-finite feature value");
    }
    for (Label l : labels_) {
        if (l != Label::Positive && l != Label::Negative) {
            throw Error(ErrorCode::MalformedData, "labels must be -1 or +1");
        }
    }
    m_pos_ = static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::Positive));
}

double Dataset::lambda() const noexcept {
    if (m_pos_ == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(m_neg()) / static_cast<double>(m_pos_);
}

std::vector<std::size_t> Dataset::positive_indices() const {
    std::vector<std::size_t> out;
    out.reserve(m_pos_);
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == Label::Positive) out.push_back(i);
    return out;
}

std::vector<std::size_t> Dataset::negative_indices() const {
    std::vector<std::size_t> out;
    out.reserve(m_neg());
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == Label::Negative) out.push_back(i);
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Label> labels;
    labels.reserve(indices.size());
    for (std::size_t i : indices) labels.push_back(labels_[i]);
    std::optional<std::vector<std::int64_t>> groups;
    if (group_ids_) {
        groups.emplace();
        groups->reserve(indices.size());
        for (std::size_t i : indices) groups->push_back((*group_ids_)[i]);
    }
    Matrix features = features_.select_rows(indices);
    if (indices.empty()) features = Matrix(0, features_.cols());
    return Dataset(std::move(features), std::move(labels), std::move(groups));
}

void Dataset::require_both_classes() const {
    if (m_pos_ == 0 || m_neg() == 0) {
        throw Error(ErrorCode::SingleClassInput, "both classes must be present (M+=" +
                                                     std::to_string(m_pos_) +
                                                     ", M-=" + std::to_string(m_neg()) + ")");
    }
}

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
    for (double w : values_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
        }
    }
}

WeightVector WeightVector::uniform(std::size_t n) {
    return WeightVector(std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n)));
}

double WeightVector::sum() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

void WeightVector::push_back(double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
    }
    values_.push_back(w);
}

WeightVector normalize_weights(const WeightVector& w) {
    double total = w.sum();
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroWeights, "cannot normalize all-zero weights");
    std::vector<double> out(w.values());
    for (double& v : out) v /= total;
    return WeightVector(std::move(out));
}

std::vector<Fold> stratified_kfold(const Dataset& data, std::size_t k, RngStream rng) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
    if (data.m_pos() < k || data.m_neg() < k) {
        throw Error(ErrorCode::TooFewSamples,
                    "each class needs at least k=" + std::to_string(k) + " samples (M+=" +
                        std::to_string(data.m_pos()) + ", M-=" + std::to_string(data.m_neg()) + ")");
    }
    std::vector<std::vector<std::size_t>> held(k);
    std::uint64_t stream = 0;
    for (auto cls : {data.positive_indices(), data.negative_indices()}) {
        RngStream class_rng = rng.child(stream++);
        class_rng.shuffle(cls);
        std::size_t base = cls.size() / k;
        std::size_t extra = cls.size() % k;
        std::size_t pos = 0;
        for (std::size_t f = 0; f < k; ++f) {
            std::size_t len = base + (f < extra ? 1 : 0);
            held[f].insert(held[f].end(), cls.begin() + static_cast<std::ptrdiff_t>(pos),
                           cls.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
        }
    }
    std::vector<Fold> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(held[f].begin(), held[f].end());
        folds[f].held_out = held[f];
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) folds[f].train.insert(folds[f].train.end(), held[g].begin(), held[g].end());
        }
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

std::size_t round_half_up(double value) noexcept {
    return static_cast<std::size_t>(std::floor(value + 0.5));
}

std::vector<std::size_t> subsample_to_skew_indices(const Dataset& data, double lambda_target,
                                                   RngStream rng) {
    if (!(lambda_target >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
    std::size_t wanted = round_half_up(static_cast<double>(data.m_pos()) * lambda_target);
    if (data.m_neg() < wanted) {
        throw Error(ErrorCode::InsufficientNegatives,
                    "need " + std::to_string(wanted) + " negatives, have " +
                        std::to_string(data.m_neg()));
    }
    auto negatives = data.negative_indices();
    rng.shuffle(negatives);
    negatives.resize(wanted);
    auto keep = data.positive_indices();
    keep.insert(keep.end(), negatives.begin(), negatives.end());
    std::sort(keep.begin(), keep.end());
    return keep;
}

Dataset subsample_to_skew(const Dataset& data, double lambda_target, RngStream rng) {
    auto keep = subsample_to_skew_indices(data, lambda_target, std::move(rng));
    return data.subset(keep);
}

}  // namespace pboost
