#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pboost/dataset.hpp"
#include "pboost/matrix.hpp"

namespace pboost {

/// A trained two-class scorer. Positive decision values vote for the
/// positive class. Implementations are immutable once built.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual double decision_value(std::span<const double> x) const = 0;
    /// Kernel evaluations needed per probe (support vectors for an SVM).
    virtual std::size_t n_sv() const = 0;
    virtual std::string_view kind() const = 0;

    Label predict(std::span<const double> x) const { return label_from_sign(decision_value(x)); }
};

struct LearnerConfig {
    double c_penalty = 1.0;
    /// KKT violation (max_up - min_low) at which SMO stops.
    double smo_tolerance = 1e-3;
    /// SMO iteration cap, in multiples of the training-set size.
    std::size_t max_passes = 10;
    /// Budget for cached kernel rows.
    std::size_t cache_megabytes = 256;

    void validate() const;
};

/// K(a, b) = exp(-||a - b||^2 / (2 kappa^2)).
double rbf_kernel(std::span<const double> a, std::span<const double> b, double kappa) noexcept;

/// RBF SVM in dual form: f(x) = sum_j coef_j K(x, sv_j) + bias, with
/// coef_j = alpha_j * y_j.
class SvmModel final : public Classifier {
public:
    SvmModel(Matrix support_vectors, std::vector<double> dual_coefficients, double bias, double kappa,
             bool converged = true, std::size_t iterations = 0);

    double decision_value(std::span<const double> x) const override;
    std::size_t n_sv() const override { return support_vectors_.rows(); }
    std::string_view kind() const override { return "svm"; }

    const Matrix& support_vectors() const noexcept { return support_vectors_; }
    const std::vector<double>& dual_coefficients() const noexcept { return dual_coefficients_; }
    double bias() const noexcept { return bias_; }
    double kappa() const noexcept { return kappa_; }
    bool converged() const noexcept { return converged_; }
    std::size_t iterations() const noexcept { return iterations_; }

    /// sum_j alpha_j - 1/2 sum_jk coef_j coef_k K(sv_j, sv_k).
    double dual_objective() const;

private:
    Matrix support_vectors_;
    std::vector<double> dual_coefficients_;
    double bias_;
    double kappa_;
    bool converged_;
    std::size_t iterations_;
};

/// Mean nearest-neighbour distance averaged with the scatter radius (max
/// distance to the feature mean). Duplicate rows are not counted as
/// neighbours. Throws DegenerateData when every row is identical.
double rbf_kappa_heuristic(const Matrix& features);

/// C-SVC trained with SMO using second-order working-set selection.
/// Throws SingleClassInput. Hitting the iteration cap is reported through
/// SvmModel::converged() rather than an exception.
SvmModel train_svm(const Matrix& features, std::span<const Label> labels, const LearnerConfig& cfg,
                   double kappa);

/// Throws DimensionMismatch when x has the wrong width.
double decision_value(const SvmModel& model, std::span<const double> x);

}  // namespace pboost
