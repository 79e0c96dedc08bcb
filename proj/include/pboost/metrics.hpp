#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pboost/dataset.hpp"

namespace pboost {

/// Weighted (or raw, with unit weights) confusion-matrix cells.
struct ConfusionCounts {
    double tp = 0.0;
    double fp = 0.0;
    double tn = 0.0;
    double fn = 0.0;

    double total() const noexcept { return tp + fp + tn + fn; }
};

ConfusionCounts weighted_confusion(std::span<const Label> truth, std::span<const Label> predicted,
                                   const WeightVector& weights);
ConfusionCounts confusion(std::span<const Label> truth, std::span<const Label> predicted);

double f_beta(const ConfusionCounts& c, double beta);
double g_mean(const ConfusionCounts& c);
/// Precision expressed through rates and the skew lambda = M-/M+.
double precision_skewed(double tpr, double fpr, double lambda);
/// pi is the proportion of positive samples.
double expected_cost(const ConfusionCounts& c, double pi, double cost_fn, double cost_fp);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

/// Points of a descending-threshold sweep. Only thresholds with at least one
/// true positive appear; thresholds[i] is the score cut of points[i] (a sample
/// is called positive when score >= threshold).
struct PrCurve {
    std::vector<PrPoint> points;
    std::vector<double> thresholds;
};

struct PrResult {
    PrCurve curve;
    double aupr = 0.0;
};

/// Sweeps every distinct score as a threshold and integrates precision over
/// recall with the trapezoid rule; the curve is anchored at recall 0 with the
/// precision of the first point. Throws NoPositives.
PrResult pr_curve_and_aupr(std::span<const double> scores, std::span<const Label> labels);

struct ThresholdChoice {
    double threshold = 0.0;
    double f = 0.0;
};

/// Candidate thresholds: -inf, midpoints of consecutive distinct scores, +inf
/// (ascending).
std::vector<double> threshold_candidates(std::span<const double> scores);

ConfusionCounts confusion_at_threshold(std::span<const double> scores, std::span<const Label> labels,
                                       double threshold);

/// Candidate threshold maximizing F_beta; ties resolve to the lowest
/// threshold. Throws NoPositives.
ThresholdChoice select_threshold_max_fbeta(std::span<const double> scores,
                                           std::span<const Label> labels, double beta);

/// CSV with header "threshold,recall,precision".
void write_pr_curve_csv(std::ostream& out, const PrCurve& curve);

}  // namespace pboost
