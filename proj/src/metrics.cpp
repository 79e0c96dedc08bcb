#include "pboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "pboost/error.hpp"

namespace pboost {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw Error(ErrorCode::LengthMismatch,
                    std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

void add_cell(ConfusionCounts& c, Label truth, Label predicted, double w) {
    if (truth == Label::Positive) {
        (predicted == Label::Positive ? c.tp : c.fn) += w;
    } else {
        (predicted == Label::Positive ? c.fp : c.tn) += w;
    }
}

std::size_t count_positives(std::span<const Label> labels) {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Positive));
}

}  // namespace

ConfusionCounts weighted_confusion(std::span<const Label> truth, std::span<const Label> predicted,
                                   const WeightVector& weights) {
    check_lengths(truth.size(), predicted.size(), "labels vs predictions");
    check_lengths(truth.size(), weights.size(), "labels vs weights");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) add_cell(c, truth[i], predicted[i], weights[i]);
    return c;
}

ConfusionCounts confusion(std::span<const Label> truth, std::span<const Label> predicted) {
    check_lengths(truth.size(), predicted.size(), "labels vs predictions");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) add_cell(c, truth[i], predicted[i], 1.0);
    return c;
}

double f_beta(const ConfusionCounts& c, double beta) {
    if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
    double b2 = beta * beta;
    double denom = (1.0 + b2) * c.tp + c.fp + b2 * c.fn;
    if (!(denom > 0.0)) {
        throw Error(ErrorCode::UndefinedMetric, "F-measure undefined without positives or false positives");
    }
    return (1.0 + b2) * c.tp / denom;
}

double g_mean(const ConfusionCounts& c) {
    double pos = c.tp + c.fn;
    double neg = c.tn + c.fp;
    if (!(pos > 0.0) || !(neg > 0.0)) {
        throw Error(ErrorCode::UndefinedMetric, "G-mean needs both classes");
    }
    return std::sqrt((c.tp / pos) * (c.tn / neg));
}

double precision_skewed(double tpr, double fpr, double lambda) {
    double denom = tpr + lambda * fpr;
    if (!(denom > 0.0)) throw Error(ErrorCode::UndefinedMetric, "precision undefined at TPR=FPR=0");
    return tpr / denom;
}

double expected_cost(const ConfusionCounts& c, double pi, double cost_fn, double cost_fp) {
    double pos = c.tp + c.fn;
    double neg = c.tn + c.fp;
    if (!(pos > 0.0) || !(neg > 0.0)) {
        throw Error(ErrorCode::UndefinedMetric, "expected cost needs both classes");
    }
    return pi * (c.fn / pos) * cost_fn + (1.0 - pi) * (c.fp / neg) * cost_fp;
}

PrResult pr_curve_and_aupr(std::span<const double> scores, std::span<const Label> labels) {
    check_lengths(scores.size(), labels.size(), "scores vs labels");
    std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) throw Error(ErrorCode::NoPositives, "PR curve needs at least one positive");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    PrResult result;
    double tp = 0.0, fp = 0.0;
    for (std::size_t k = 0; k < order.size();) {
        double s = scores[order[k]];
        while (k < order.size() && scores[order[k]] == s) {
            (labels[order[k]] == Label::Positive ? tp : fp) += 1.0;
            ++k;
        }
        if (tp > 0.0) {
            result.curve.points.push_back({tp / static_cast<double>(n_pos), tp / (tp + fp)});
            result.curve.thresholds.push_back(s);
        }
    }

    const auto& pts = result.curve.points;
    PrPoint prev{0.0, pts.front().precision};
    double area = 0.0;
    for (const auto& p : pts) {
        area += (p.recall - prev.recall) * (p.precision + prev.precision) / 2.0;
        prev = p;
    }
    result.aupr = std::clamp(area, 0.0, 1.0);
    return result;
}

std::vector<double> threshold_candidates(std::span<const double> scores) {
    std::vector<double> uniq(scores.begin(), scores.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<double> out;
    out.reserve(uniq.size() + 1);
    out.push_back(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) out.push_back(uniq[i] / 2.0 + uniq[i + 1] / 2.0);
    out.push_back(std::numeric_limits<double>::infinity());
    return out;
}

ConfusionCounts confusion_at_threshold(std::span<const double> scores, std::span<const Label> labels,
                                       double threshold) {
    check_lengths(scores.size(), labels.size(), "scores vs labels");
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        add_cell(c, labels[i], scores[i] >= threshold ? Label::Positive : Label::Negative, 1.0);
    }
    return c;
}

ThresholdChoice select_threshold_max_fbeta(std::span<const double> scores,
                                           std::span<const Label> labels, double beta) {
    check_lengths(scores.size(), labels.size(), "scores vs labels");
    std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) throw Error(ErrorCode::NoPositives, "threshold selection needs positives");
    std::size_t n_neg = labels.size() - n_pos;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Walk thresholds from +inf downward; each distinct score group joins the
    // positive side once the threshold passes below it.
    ConfusionCounts c{0.0, 0.0, static_cast<double>(n_neg), static_cast<double>(n_pos)};
    ThresholdChoice best{std::numeric_limits<double>::infinity(), f_beta(c, beta)};
    for (std::size_t k = 0; k < order.size();) {
        double s = scores[order[k]];
        while (k < order.size() && scores[order[k]] == s) {
            if (labels[order[k]] == Label::Positive) {
                c.tp += 1.0;
                c.fn -= 1.0;
            } else {
                c.fp += 1.0;
                c.tn -= 1.0;
            }
            ++k;
        }
        double threshold = k < order.size() ? s / 2.0 + scores[order[k]] / 2.0
                                            : -std::numeric_limits<double>::infinity();
        double f = f_beta(c, beta);
        if (f >= best.f) best = {threshold, f};
    }
    return best;
}

void write_pr_curve_csv(std::ostream& out, const PrCurve& curve) {
    out << "threshold,recall,precision\n";
    out.precision(17);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        out << curve.thresholds[i] << ',' << curve.points[i].recall << ','
            << curve.points[i].precision << '\n';
    }
}

}  // namespace pboost
