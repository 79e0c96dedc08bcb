#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pboost/base_learner.hpp"
#include "pboost/dataset.hpp"
#include "pboost/metrics.hpp"
#include "pboost/rng.hpp"
#include "pboost/sampling.hpp"

namespace pboost {

struct LossFactorKind {
    enum class Kind { WeightedError, FBetaLoss };
    Kind kind = Kind::WeightedError;
    double beta = 2.0;

    static LossFactorKind weighted_error() noexcept { return {}; }
    /// Throws InvalidArgument unless beta > 0.
    static LossFactorKind fbeta(double beta);
    bool is_fbeta() const noexcept { return kind == Kind::FBetaLoss; }
};

/// 1 - F_beta on (possibly weighted) counts. Throws UndefinedMetric when
/// (1+b^2)tp + fp + b^2 fn is zero.
double loss_fbeta(const ConfusionCounts& c, double beta);
/// M-/((1+b^2)M+ + M-), the F_beta loss of an always-positive classifier.
double l_b_bound(std::size_t m_pos, std::size_t m_neg, double beta);

inline constexpr double kLossClamp = 1e-10;
/// Attempts with loss >= bound - kGateTolerance are rejected.
inline constexpr double kGateTolerance = 1e-12;

double clamp_loss(double loss) noexcept;
/// loss/(1-loss) after clamping into [1e-10, 1-1e-10].
double alpha_from_loss(double loss) noexcept;

/// W(i) * alpha^{|y_i - Y_i|/2}, then normalized: misclassified entries are
/// multiplied by alpha, correct ones are left alone. Throws LengthMismatch.
WeightVector update_weights(const WeightVector& w, std::span<const Label> truth,
                            std::span<const Label> predicted, double alpha);

struct EnsembleMember {
    std::shared_ptr<const Classifier> model;
    double alpha = 1.0;
    double loss = 0.5;
    double vote_weight = 0.0;
};

struct IterationLog {
    std::size_t iteration = 0;
    /// 0-based attempt number within the iteration.
    std::size_t retries = 0;
    bool accepted = false;
    /// Set on the attempt accepted after every attempt failed the gate.
    bool exhausted = false;
    std::size_t n_tr = 0;
    std::size_t n_val = 0;
    std::size_t n_sv = 0;
    double loss = 0.0;
};

struct BoostedEnsemble {
    std::vector<EnsembleMember> members;
    std::vector<IterationLog> logs;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
    /// Logs of accepted attempts, one per member, in member order.
    std::vector<IterationLog> accepted_logs() const;
};

enum class BoostVariant { Ada, Rus, Smt, Rb };
std::string_view to_string(BoostVariant v) noexcept;

/// Weights around one accepted iteration. For pboost the vectors cover the
/// temporary set: positives first, then negatives in insertion order.
struct IterationTrace {
    std::size_t iteration = 0;
    std::size_t n_pos = 0;
    std::vector<double> weights_before;
    std::vector<double> weights_after;
};

struct BoostOptions {
    /// Attempts per iteration before the best one is taken anyway.
    std::size_t max_attempts = 10;
    std::size_t smote_k = 5;
    /// Called once per accepted iteration, after the weight update.
    std::function<void(const IterationTrace&)> observer;
};

/// Acceptance bound for an iteration: 0.5 for the weighted error, l_b from
/// the given class counts for the F_beta loss.
double loss_bound(const LossFactorKind& kind, std::size_t m_pos, std::size_t m_neg);

/// AdaBoost.M1 and its sampling variants. Every iteration validates on the
/// full training set under the current weights.
BoostedEnsemble run_boosting(BoostVariant variant, const Dataset& train, std::size_t ensemble_size,
                             const Learner& learner, const LossFactorKind& loss, RngStream rng,
                             const BoostOptions& options = {});

/// Progressive boosting over a partitioning of the training negatives: part e
/// joins a growing temporary set, N_e = |P_e| negatives are drawn from it by
/// weight for training, and the whole temporary set is used for validation.
BoostedEnsemble pboost(const Dataset& train, const Partitioning& partitioning, const Learner& learner,
                       const LossFactorKind& loss, RngStream rng, const BoostOptions& options = {});

/// sum_e decision_value_e(x) * log(1/alpha_e). Throws EmptyEnsemble.
double predict_score(const BoostedEnsemble& ensemble, std::span<const double> x);
/// Sign of sum_e sign(decision_value_e(x)) * log(1/alpha_e); 0 maps to +1.
Label predict_majority(const BoostedEnsemble& ensemble, std::span<const double> x);

std::vector<double> predict_scores(const BoostedEnsemble& ensemble, const Matrix& x);
std::vector<Label> predict_majority(const BoostedEnsemble& ensemble, const Matrix& x);

struct ComplexityTotals {
    std::size_t members = 0;
    std::size_t n_tr = 0;
    std::size_t n_val = 0;
    /// sum n_sv * n_val: kernel evaluations spent on validation.
    std::size_t sv_val = 0;
    /// sum n_sv: kernel evaluations per test probe.
    std::size_t n_sv = 0;
    std::size_t discarded = 0;
    std::size_t discarded_n_tr = 0;
    std::size_t discarded_n_val = 0;
    std::size_t exhausted = 0;
};

/// Totals over accepted iterations; rejected attempts are counted apart.
ComplexityTotals complexity_report(const BoostedEnsemble& ensemble);

/// Header row; key_columns names the leading column(s) written as `label`.
void write_complexity_csv_header(std::ostream& out, std::string_view key_columns = "label");
void write_complexity_csv_row(std::ostream& out, std::string_view label, const ComplexityTotals& t);

}  // namespace pboost
