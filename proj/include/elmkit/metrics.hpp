#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "elmkit/errors.hpp"

namespace elmkit {

/// Probability clip applied before log loss. ELM scores are unbounded
/// reals, so anything outside [eps, 1-eps] is clipped; this is what makes
/// wildly out-of-range scores cost -ln(eps) ~ 16.1 nats apiece.
inline constexpr double kProbEps = 1e-7;

inline double clip_probability(double score) {
    return std::min(std::max(score, kProbEps), 1.0 - kProbEps);
}

namespace detail {
inline void check_scores(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
    if (scores.empty()) throw ShapeError("empty metric input");
}
}  // namespace detail

/// AUC as the Mann-Whitney rank statistic with average ranks on ties:
/// the probability that a random positive outranks a random negative.
/// O(n log n); requires both classes present.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
    detail::check_scores(scores, labels);
    const std::size_t n = scores.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * double(i + 1 + j);  // mean of ranks i+1..j (1-based)
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum_pos += avg_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw UndefinedMetricError("AUC undefined: only one class present");
    return (rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1)) /
           (double(n_pos) * double(n_neg));
}

/// Mean negative log-likelihood of clipped probabilities.
inline double logloss(std::span<const double> scores, std::span<const int> labels) {
    detail::check_scores(scores, labels);
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = clip_probability(scores[i]);
        sum -= labels[i] == 1 ? std::log(p) : std::log1p(-p);
    }
    return sum / double(scores.size());
}

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision/recall/F1 of the positive class when predicting 1 iff
/// score >= threshold. Degenerate denominators yield 0, matching the F1 = 0
/// rows that all-negative predictions produce.
inline Prf prf1(std::span<const double> scores, std::span<const int> labels, double threshold) {
    detail::check_scores(scores, labels);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (pred && labels[i] == 1)
            ++tp;
        else if (pred)
            ++fp;
        else if (labels[i] == 1)
            ++fn;
    }
    Prf out;
    out.precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
    out.recall = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
    out.f1 = (out.precision + out.recall) > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

/// F1-maximizing threshold over the distinct score values, ties broken
/// toward the larger threshold. One descending sweep with running counts.
inline double tune_threshold(std::span<const double> scores, std::span<const int> labels) {
    detail::check_scores(scores, labels);
    const std::size_t n = scores.size();
    std::size_t total_pos = 0;
    for (int l : labels) total_pos += std::size_t(l == 1);
    if (total_pos == 0)
        throw UndefinedMetricError("threshold tuning undefined without positives");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double best_f1 = -1.0;
    double best_threshold = scores[order[0]];
    std::size_t tp = 0, predicted = 0;
    std::size_t i = 0;
    while (i < n) {
        const double t = scores[order[i]];
        std::size_t j = i;
        while (j < n && scores[order[j]] == t) {
            if (labels[order[j]] == 1) ++tp;
            ++j;
        }
        predicted += j - i;
        // threshold = t predicts positive for everything seen so far
        const double precision = double(tp) / double(predicted);
        const double recall = double(tp) / double(total_pos);
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        // strict improvement only: the descending sweep then breaks F1 ties
        // toward the larger threshold
        if (f1 > best_f1) {
            best_f1 = f1;
            best_threshold = t;
        }
        i = j;
    }
    return best_threshold;
}

/// The evaluation bundle reported for every run.
struct MetricReport {
    double logloss = 0.0;
    double auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double threshold = 0.5;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

inline MetricReport evaluate(std::span<const double> scores, std::span<const int> labels,
                             double threshold) {
    detail::check_scores(scores, labels);
    MetricReport r;
    r.threshold = threshold;
    r.logloss = logloss(scores, labels);
    r.auc = auc(scores, labels);
    const Prf p = prf1(scores, labels, threshold);
    r.precision = p.precision;
    r.recall = p.recall;
    r.f1 = p.f1;
    for (int l : labels) (l == 1 ? r.positives : r.negatives) += 1;
    return r;
}

}  // namespace elmkit
