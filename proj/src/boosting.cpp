#include "pboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <tuple>

#include "pboost/error.hpp"

namespace pboost {

LossFactorKind LossFactorKind::fbeta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
    return {Kind::FBetaLoss, beta};
}

double loss_fbeta(const ConfusionCounts& c, double beta) {
    if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
    const double b2 = beta * beta;
    const double wrong = c.fp + b2 * c.fn;
    const double denom = (1.0 + b2) * c.tp + wrong;
    if (!(denom > 0.0)) throw Error(ErrorCode::UndefinedMetric, "F-measure loss undefined on empty counts");
    return wrong / denom;
}

double l_b_bound(std::size_t m_pos, std::size_t m_neg, double beta) {
    if (m_pos == 0 || m_neg == 0) throw Error(ErrorCode::InvalidArgument, "l_b needs both classes");
    if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
    const double neg = static_cast<double>(m_neg);
    return neg / ((1.0 + beta * beta) * static_cast<double>(m_pos) + neg);
}

double clamp_loss(double loss) noexcept { return std::clamp(loss, kLossClamp, 1.0 - kLossClamp); }

double alpha_from_loss(double loss) noexcept {
    const double l = clamp_loss(loss);
    return l / (1.0 - l);
}

WeightVector update_weights(const WeightVector& w, std::span<const Label> truth,
                            std::span<const Label> predicted, double alpha) {
    if (truth.size() != w.size() || predicted.size() != w.size()) {
        throw Error(ErrorCode::LengthMismatch, "weights, labels and predictions must align");
    }
    std::vector<double> out(w.values());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (truth[i] != predicted[i]) out[i] *= alpha;
    return normalize_weights(WeightVector(std::move(out)));
}

std::vector<IterationLog> BoostedEnsemble::accepted_logs() const {
    std::vector<IterationLog> out;
    for (const auto& log : logs)
        if (log.accepted) out.push_back(log);
    return out;
}

std::string_view to_string(BoostVariant v) noexcept {
    switch (v) {
        case BoostVariant::Ada: return "Ada";
        case BoostVariant::Rus: return "RUS";
        case BoostVariant::Smt: return "SMT";
        case BoostVariant::Rb: return "RB";
    }
    return "?";
}

double loss_bound(const LossFactorKind& kind, std::size_t m_pos, std::size_t m_neg) {
    return kind.is_fbeta() ? l_b_bound(m_pos, m_neg, kind.beta) : 0.5;
}

namespace {

double attempt_loss(const LossFactorKind& kind, const ConfusionCounts& c) {
    if (kind.is_fbeta()) return loss_fbeta(c, kind.beta);
    const double total = c.total();
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroWeights, "validation weights sum to zero");
    return (c.fp + c.fn) / total;
}

struct Attempt {
    std::shared_ptr<const Classifier> model;
    std::vector<Label> predictions;
    double loss = 0.0;
    std::size_t n_tr = 0;
};

std::vector<Label> predict_rows(const Classifier& model, const Matrix& x) {
    std::vector<Label> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict(x.row(i));
    return out;
}

// Runs attempts until one clears the gate or the cap is hit, logging each.
// make_attempt(attempt_rng) returns the trained model and its n_tr.
template <typename MakeAttempt>
Attempt gated_iteration(std::size_t iteration, const LossFactorKind& kind, double bound,
                        const Matrix& val_x, std::span<const Label> val_y, const WeightVector& val_w,
                        RngStream rng, const BoostOptions& options, BoostedEnsemble& out,
                        MakeAttempt&& make_attempt) {
    const std::size_t cap = std::max<std::size_t>(options.max_attempts, 1);
    const std::size_t first_log = out.logs.size();
    Attempt best;
    std::size_t best_at = 0;
    bool have_best = false;
    for (std::size_t a = 0; a < cap; ++a) {
        Attempt att;
        std::tie(att.model, att.n_tr) = make_attempt(rng.child(a));
        att.predictions = predict_rows(*att.model, val_x);
        att.loss = attempt_loss(kind, weighted_confusion(val_y, att.predictions, val_w));

        IterationLog log;
        log.iteration = iteration;
        log.retries = a;
        log.n_tr = att.n_tr;
        log.n_val = val_x.rows();
        log.n_sv = att.model->n_sv();
        log.loss = att.loss;
        const bool passes = att.loss < bound - kGateTolerance;
        log.accepted = passes;
        out.logs.push_back(log);
        if (passes) return att;
        if (!have_best || att.loss < best.loss) {
            best = std::move(att);
            best_at = a;
            have_best = true;
        }
    }
    auto& log = out.logs[first_log + best_at];
    log.accepted = true;
    log.exhausted = true;
    return best;
}

EnsembleMember make_member(const Attempt& att) {
    EnsembleMember m;
    m.model = att.model;
    m.loss = att.loss;
    m.alpha = alpha_from_loss(att.loss);
    m.vote_weight = std::log(1.0 / m.alpha);
    return m;
}

// Copy of `data` with extra rows appended under the given label.
Dataset with_rows(const Dataset& data, const Matrix& extra, Label label) {
    Matrix x = data.features();
    std::vector<Label> y = data.labels();
    for (std::size_t r = 0; r < extra.rows(); ++r) {
        x.append_row(extra.row(r));
        y.push_back(label);
    }
    return Dataset(std::move(x), std::move(y));
}

// Weighted resampling can miss a class entirely; such a draw yields the
// constant classifier for the class that is present.
std::shared_ptr<const Classifier> train_member(const Learner& learner, const Dataset& sub, RngStream rng) {
    if (sub.m_pos() == 0) return std::make_shared<ConstantClassifier>(Label::Negative);
    if (sub.m_neg() == 0) return std::make_shared<ConstantClassifier>(Label::Positive);
    return learner.train(sub, std::move(rng));
}

double mean_weight(const WeightVector& w, std::span<const std::size_t> idx) {
    if (idx.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i : idx) s += w[i];
    return s / static_cast<double>(idx.size());
}

}  // namespace

BoostedEnsemble run_boosting(BoostVariant variant, const Dataset& train, std::size_t ensemble_size,
                             const Learner& learner, const LossFactorKind& loss, RngStream rng,
                             const BoostOptions& options) {
    train.require_both_classes();
    if (ensemble_size == 0) throw Error(ErrorCode::InvalidArgument, "ensemble size must be >= 1");
    const std::size_t m = train.size();
    const std::size_t m_pos = train.m_pos();
    const std::size_t m_neg = train.m_neg();
    const auto pos = train.positive_indices();
    const auto neg = train.negative_indices();
    const double bound = loss_bound(loss, m_pos, m_neg);

    BoostedEnsemble out;
    WeightVector w = WeightVector::uniform(m);
    for (std::size_t e = 0; e < ensemble_size; ++e) {
        auto make_attempt = [&](RngStream arng) -> std::pair<std::shared_ptr<const Classifier>, std::size_t> {
            Dataset sub;
            switch (variant) {
                case BoostVariant::Ada: {
                    sub = train.subset(weighted_resample_indices(w, m, arng.child(0)));
                    break;
                }
                case BoostVariant::Rus: {
                    std::vector<double> wn;
                    wn.reserve(neg.size());
                    for (std::size_t i : neg) wn.push_back(w[i]);
                    auto drawn = weighted_sample_without_replacement(WeightVector(std::move(wn)),
                                                                     std::min(m_pos, m_neg), arng.child(0));
                    std::vector<std::size_t> rows = pos;
                    for (std::size_t k : drawn) rows.push_back(neg[k]);
                    std::sort(rows.begin(), rows.end());
                    sub = train.subset(rows);
                    break;
                }
                case BoostVariant::Smt: {
                    const std::size_t n_new = m_neg > m_pos ? m_neg - m_pos : 0;
                    Matrix synth = smote(train.features().select_rows(pos), n_new, options.smote_k,
                                         arng.child(0));
                    Dataset aug = with_rows(train, synth, Label::Positive);
                    std::vector<double> aw(w.values());
                    aw.resize(aug.size(), mean_weight(w, pos));
                    sub = aug.subset(weighted_resample_indices(WeightVector(std::move(aw)), 2 * m_neg,
                                                               arng.child(1)));
                    break;
                }
                case BoostVariant::Rb: {
                    auto bal = random_balance_traced(train, arng.child(0), options.smote_k);
                    const double mean_pos = mean_weight(w, pos);
                    const double mean_neg = mean_weight(w, neg);
                    std::vector<double> bw;
                    bw.reserve(bal.data.size());
                    for (std::size_t r = 0; r < bal.data.size(); ++r) {
                        if (bal.origin[r]) {
                            bw.push_back(w[*bal.origin[r]]);
                        } else {
                            bw.push_back(bal.data.label(r) == Label::Positive ? mean_pos : mean_neg);
                        }
                    }
                    sub = bal.data.subset(weighted_resample_indices(WeightVector(std::move(bw)), m,
                                                                    arng.child(1)));
                    break;
                }
            }
            return {train_member(learner, sub, arng.child(2)), sub.size()};
        };
        Attempt att = gated_iteration(e, loss, bound, train.features(), train.labels(), w, rng.child(e),
                                      options, out, make_attempt);
        EnsembleMember member = make_member(att);
        WeightVector next = update_weights(w, train.labels(), att.predictions, member.alpha);
        if (options.observer) options.observer({e, m_pos, w.values(), next.values()});
        w = std::move(next);
        out.members.push_back(std::move(member));
    }
    return out;
}

BoostedEnsemble pboost(const Dataset& train, const Partitioning& partitioning, const Learner& learner,
                       const LossFactorKind& loss, RngStream rng, const BoostOptions& options) {
    train.require_both_classes();
    const auto pos = train.positive_indices();
    const auto neg = train.negative_indices();
    partitioning.validate(neg.size());
    const double bound = loss_bound(loss, pos.size(), neg.size());

    // Temporary set: positives first, then negatives in order of insertion.
    std::vector<std::size_t> tmp_rows = pos;
    std::vector<double> tmp_w(pos.size(), 1.0);
    double w_ini = 1.0;

    BoostedEnsemble out;
    for (std::size_t e = 0; e < partitioning.count(); ++e) {
        const auto& part = partitioning.parts[e];
        for (std::size_t k : part) {
            tmp_rows.push_back(neg[k]);
            tmp_w.push_back(w_ini);
        }
        WeightVector w = normalize_weights(WeightVector(tmp_w));
        const Dataset tmp = train.subset(tmp_rows);
        const std::size_t n_e = part.size();

        auto make_attempt = [&](RngStream arng) -> std::pair<std::shared_ptr<const Classifier>, std::size_t> {
            std::vector<double> wn(w.values().begin() + static_cast<std::ptrdiff_t>(pos.size()),
                                   w.values().end());
            auto drawn = weighted_sample_without_replacement(WeightVector(std::move(wn)), n_e, arng.child(0));
            std::vector<std::size_t> rows(pos.size());
            for (std::size_t i = 0; i < pos.size(); ++i) rows[i] = i;
            for (std::size_t k : drawn) rows.push_back(pos.size() + k);
            Dataset sub = tmp.subset(rows);
            return {train_member(learner, sub, arng.child(2)), sub.size()};
        };
        Attempt att = gated_iteration(e, loss, bound, tmp.features(), tmp.labels(), w, rng.child(e), options,
                                      out, make_attempt);
        EnsembleMember member = make_member(att);
        WeightVector next = update_weights(w, tmp.labels(), att.predictions, member.alpha);
        if (options.observer) options.observer({e, pos.size(), w.values(), next.values()});
        tmp_w = next.values();
        w_ini = *std::max_element(tmp_w.begin() + static_cast<std::ptrdiff_t>(pos.size()), tmp_w.end());
        out.members.push_back(std::move(member));
    }
    return out;
}

double predict_score(const BoostedEnsemble& ensemble, std::span<const double> x) {
    if (ensemble.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble has no members");
    double s = 0.0;
    for (const auto& m : ensemble.members) s += m.model->decision_value(x) * m.vote_weight;
    return s;
}

Label predict_majority(const BoostedEnsemble& ensemble, std::span<const double> x) {
    if (ensemble.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble has no members");
    double s = 0.0;
    for (const auto& m : ensemble.members) s += to_int(m.model->predict(x)) * m.vote_weight;
    return s >= 0.0 ? Label::Positive : Label::Negative;
}

std::vector<double> predict_scores(const BoostedEnsemble& ensemble, const Matrix& x) {
    if (ensemble.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble has no members");
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_score(ensemble, x.row(i));
    return out;
}

std::vector<Label> predict_majority(const BoostedEnsemble& ensemble, const Matrix& x) {
    if (ensemble.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble has no members");
    std::vector<Label> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_majority(ensemble, x.row(i));
    return out;
}

ComplexityTotals complexity_report(const BoostedEnsemble& ensemble) {
    ComplexityTotals t;
    for (const auto& log : ensemble.logs) {
        if (log.accepted) {
            ++t.members;
            t.n_tr += log.n_tr;
            t.n_val += log.n_val;
            t.sv_val += log.n_sv * log.n_val;
            t.n_sv += log.n_sv;
            if (log.exhausted) ++t.exhausted;
        } else {
            ++t.discarded;
            t.discarded_n_tr += log.n_tr;
            t.discarded_n_val += log.n_val;
        }
    }
    return t;
}

void write_complexity_csv_header(std::ostream& out, std::string_view key_columns) {
    out << key_columns << ",members,n_tr,n_val,sv_x_val,n_sv,discarded,discarded_n_tr,discarded_n_val,exhausted\n";
}

void write_complexity_csv_row(std::ostream& out, std::string_view label, const ComplexityTotals& t) {
    out << label << ',' << t.members << ',' << t.n_tr << ',' << t.n_val << ',' << t.sv_val << ',' << t.n_sv
        << ',' << t.discarded << ',' << t.discarded_n_tr << ',' << t.discarded_n_val << ',' << t.exhausted
        << '\n';
}

}  // namespace pboost
