#include "pboost/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>

#include "pboost/error.hpp"

namespace pboost {

void LearnerConfig::validate() const {
    if (!(c_penalty > 0.0) || !(smo_tolerance > 0.0) || max_passes == 0 || cache_megabytes == 0) {
        throw Error(ErrorCode::InvalidArgument, "learner configuration values must be positive");
    }
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double kappa) noexcept {
    return std::exp(-squared_distance(a, b) / (2.0 * kappa * kappa));
}

SvmModel::SvmModel(Matrix support_vectors, std::vector<double> dual_coefficients, double bias,
                   double kappa, bool converged, std::size_t iterations)
    : support_vectors_(std::move(support_vectors)),
      dual_coefficients_(std::move(dual_coefficients)),
      bias_(bias),
      kappa_(kappa),
      converged_(converged),
      iterations_(iterations) {
    if (support_vectors_.rows() != dual_coefficients_.size()) {
        throw Error(ErrorCode::LengthMismatch, "support vectors vs dual coefficients");
    }
    if (!(kappa_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
}

double SvmModel::decision_value(std::span<const double> x) const {
    if (x.size() != support_vectors_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "probe has " + std::to_string(x.size()) +
                                                      " features, model expects " +
                                                      std::to_string(support_vectors_.cols()));
    }
    const double scale = -1.0 / (2.0 * kappa_ * kappa_);
    double sum = bias_;
    for (std::size_t j = 0; j < dual_coefficients_.size(); ++j) {
        sum += dual_coefficients_[j] * std::exp(scale * squared_distance(x, support_vectors_.row(j)));
    }
    return sum;
}

double SvmModel::dual_objective() const {
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t j = 0; j < dual_coefficients_.size(); ++j) {
        linear += std::abs(dual_coefficients_[j]);
        for (std::size_t k = 0; k < dual_coefficients_.size(); ++k) {
            quad += dual_coefficients_[j] * dual_coefficients_[k] *
                    rbf_kernel(support_vectors_.row(j), support_vectors_.row(k), kappa_);
        }
    }
    return linear - 0.5 * quad;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
    return model.decision_value(x);
}

double rbf_kappa_heuristic(const Matrix& features) {
    const std::size_t n = features.rows();
    if (n < 2) throw Error(ErrorCode::DegenerateData, "kappa heuristic needs at least two rows");
    const std::size_t d = features.cols();

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) mean[k] += features(i, k);
    for (double& m : mean) m /= static_cast<double>(n);

    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, distance(features.row(i), mean));

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = features.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = squared_distance(xi, features.row(j));
            if (d2 > 0.0) {
                nearest[i] = std::min(nearest[i], d2);
                nearest[j] = std::min(nearest[j], d2);
            }
        }
    }
    double sum = 0.0;
    std::size_t counted = 0;
    for (double d2 : nearest) {
        if (std::isfinite(d2)) {
            sum += std::sqrt(d2);
            ++counted;
        }
    }
    if (counted == 0) throw Error(ErrorCode::DegenerateData, "all rows are identical");
    double kappa = (sum / static_cast<double>(counted) + radius) / 2.0;
    if (!(kappa > 0.0)) throw Error(ErrorCode::DegenerateData, "kappa heuristic evaluated to zero");
    return kappa;
}

namespace {

constexpr double kTau = 1e-12;

// LRU cache of full kernel rows over the training set.
class KernelRows {
public:
    KernelRows(const Matrix& x, double kappa, std::size_t budget_bytes)
        : x_(x), scale_(-1.0 / (2.0 * kappa * kappa)), slot_of_(x.rows(), kNone) {
        const std::size_t n = x.rows();
        std::size_t per_row = std::max<std::size_t>(1, n * sizeof(double));
        capacity_ = std::clamp<std::size_t>(budget_bytes / per_row, 2, std::max<std::size_t>(n, 2));
    }

    const double* row(std::size_t i) {
        if (slot_of_[i] != kNone) {
            auto& slot = slots_[slot_of_[i]];
            lru_.splice(lru_.end(), lru_, slot.position);
            return slot.values.data();
        }
        std::size_t s;
        if (slots_.size() < capacity_) {
            s = slots_.size();
            slots_.push_back({});
            slots_[s].values.resize(x_.rows());
        } else {
            std::size_t victim = lru_.front();
            lru_.pop_front();
            s = slot_of_[victim];
            slot_of_[victim] = kNone;
        }
        slot_of_[i] = s;
        lru_.push_back(i);
        slots_[s].position = std::prev(lru_.end());
        auto xi = x_.row(i);
        auto& values = slots_[s].values;
        for (std::size_t t = 0; t < x_.rows(); ++t) {
            values[t] = std::exp(scale_ * squared_distance(xi, x_.row(t)));
        }
        return values.data();
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    struct Slot {
        std::vector<double> values;
        std::list<std::size_t>::iterator position;
    };
    const Matrix& x_;
    double scale_;
    std::size_t capacity_ = 2;
    std::vector<std::size_t> slot_of_;
    std::vector<Slot> slots_;
    std::list<std::size_t> lru_;
};

}  // namespace

SvmModel train_svm(const Matrix& features, std::span<const Label> labels, const LearnerConfig& cfg,
                   double kappa) {
    cfg.validate();
    const std::size_t n = features.rows();
    if (labels.size() != n) throw Error(ErrorCode::LengthMismatch, "features vs labels");
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
    bool has_pos = std::find(labels.begin(), labels.end(), Label::Positive) != labels.end();
    bool has_neg = std::find(labels.begin(), labels.end(), Label::Negative) != labels.end();
    if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClassInput, "SVM needs both classes");

    const double c = cfg.c_penalty;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = to_int(labels[i]);

    // Minimize 1/2 a'Qa - e'a s.t. y'a = 0, 0 <= a <= C; G is the gradient Qa - e.
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    KernelRows kernel(features, kappa, cfg.cache_megabytes << 20);

    auto at_upper = [&](std::size_t t) { return alpha[t] >= c; };
    auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    const std::size_t max_iter = cfg.max_passes * n;
    std::size_t iter = 0;
    bool converged = false;
    while (true) {
        // Maximal violating i, then j by second-order gain.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (!at_upper(t) && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (!at_lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        if (i == n) {
            converged = true;
            break;
        }
        const double* ki = kernel.row(i);
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            double grad_diff;
            if (y[t] > 0) {
                if (at_lower(t)) continue;
                gmax2 = std::max(gmax2, grad[t]);
                grad_diff = gmax + grad[t];
            } else {
                if (at_upper(t)) continue;
                gmax2 = std::max(gmax2, -grad[t]);
                grad_diff = gmax - grad[t];
            }
            if (grad_diff > 0.0) {
                double quad = 2.0 - 2.0 * ki[t];
                if (quad <= 0.0) quad = kTau;
                double gain = -(grad_diff * grad_diff) / quad;
                if (gain <= best_gain) {
                    best_gain = gain;
                    j = t;
                }
            }
        }
        if (gmax + gmax2 < cfg.smo_tolerance || j == n) {
            converged = true;
            break;
        }
        if (iter >= max_iter) break;
        ++iter;

        const double* kj = kernel.row(j);
        ki = kernel.row(i);
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        double quad = 2.0 - 2.0 * ki[j];
        if (quad <= 0.0) quad = kTau;
        double ai = old_ai;
        double aj = old_aj;
        if (y[i] != y[j]) {
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c) {
                    ai = c;
                    aj = c - diff;
                }
            } else if (aj > c) {
                aj = c;
                ai = c + diff;
            }
        } else {
            double delta = (grad[i] - grad[j]) / quad;
            double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c) {
                if (ai > c) {
                    ai = c;
                    aj = sum - c;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c) {
                if (aj > c) {
                    aj = c;
                    ai = sum - c;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        const double dai = (ai - old_ai) * y[i];
        const double daj = (aj - old_aj) * y[j];
        for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki[t] * dai + kj[t] * daj);
    }

    // Offset from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double yg = y[t] * grad[t];
        if (at_upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    Matrix sv(0, features.cols());
    std::vector<double> coef;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            sv.append_row(features.row(t));
            coef.push_back(alpha[t] * y[t]);
        }
    }
    return SvmModel(std::move(sv), std::move(coef), -rho, kappa, converged, iter);
}

}  // namespace pboost
