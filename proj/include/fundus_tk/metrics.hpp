#pragma once

// Challenge evaluation metrics: classification AUC, segmentation Dice,
// per-image detection F1 and fovea Euclidean distance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fundus_tk/core.hpp"

namespace ftk::metrics {

namespace detail {

inline void check_scores_labels(std::span<const double> scores, std::span<const int> labels, const char* what) {
    if (scores.size() != labels.size()) throw ParameterError(std::string(what) + ": length mismatch");
    for (double s : scores)
        if (std::isnan(s)) throw ParameterError(std::string(what) + ": NaN score");
    for (int y : labels)
        if (y != 0 && y != 1) throw ParameterError(std::string(what) + ": labels must be 0 or 1");
}

}  // namespace detail

/// Area under the ROC curve as the Mann-Whitney statistic; ties earn half credit.
///
/// Runs in O(n log n): scores are sorted once and each tie group contributes
/// 2 * pos_in_group * neg_below + pos_in_group * neg_in_group half-units.
/// The count is kept in integers, so the only rounding is the final division.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
    detail::check_scores_labels(scores, labels, "auc");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::uint64_t n_pos = 0;
    std::uint64_t n_neg = 0;
    std::uint64_t half_units = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::uint64_t pos = 0;
        std::uint64_t neg = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? pos : neg) += 1;
            ++j;
        }
        half_units += 2 * pos * n_neg + pos * neg;
        n_pos += pos;
        n_neg += neg;
        i = j;
    }
    if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("auc: labels contain a single class");
    return static_cast<double>(half_units) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

/// Operating points for every distinct score used as a ">= threshold" cut,
/// highest threshold first. The (0,0) origin is not included.
inline std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels) {
    detail::check_scores_labels(scores, labels, "roc_points");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    const auto n_pos = static_cast<double>(std::ranges::count(labels, 1));
    const auto n_neg = static_cast<double>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("roc_points: labels contain a single class");

    std::vector<RocPoint> out;
    double tp = 0;
    double fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] ? tp : fp) += 1;
            ++i;
        }
        out.push_back({s, fp / n_neg, tp / n_pos});
    }
    return out;
}

struct Overlap {
    std::size_t pred = 0;
    std::size_t gt = 0;
    std::size_t intersection = 0;
};

inline Overlap overlap(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_size(pred.width(), pred.height(), gt.width(), gt.height(), "dice");
    Overlap o;
    const auto p = pred.bits();
    const auto g = gt.bits();
    for (std::size_t i = 0; i < p.size(); ++i) {
        o.pred += p[i];
        o.gt += g[i];
        o.intersection += p[i] & g[i];
    }
    return o;
}

/// 2|P n G| / (|P| + |G|). An empty ground truth excludes the image from Dice
/// averaging and yields nullopt.
inline std::optional<double> dice(const BinaryMask& pred, const BinaryMask& gt) {
    const auto o = overlap(pred, gt);
    if (o.gt == 0) return std::nullopt;
    return 2.0 * static_cast<double>(o.intersection) / static_cast<double>(o.pred + o.gt);
}

/// |P n G| / |P u G|; nullopt when both masks are empty.
inline std::optional<double> iou(const BinaryMask& pred, const BinaryMask& gt) {
    const auto o = overlap(pred, gt);
    const std::size_t uni = o.pred + o.gt - o.intersection;
    if (uni == 0) return std::nullopt;
    return static_cast<double>(o.intersection) / static_cast<double>(uni);
}

struct DetectionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

/// F1 = 2TP / (2TP + FP + FN); 1.0 when there is nothing to detect and nothing was flagged.
inline double f1(const DetectionCounts& c) {
    const std::size_t denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

inline DetectionCounts count_detections(const std::vector<bool>& pred_present, const std::vector<bool>& gt_present) {
    if (pred_present.size() != gt_present.size()) throw ParameterError("detection_f1: length mismatch");
    DetectionCounts c;
    for (std::size_t i = 0; i < pred_present.size(); ++i) {
        const bool p = pred_present[i];
        const bool g = gt_present[i];
        if (p && g) ++c.tp;
        else if (p) ++c.fp;
        else if (g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

inline double detection_f1(const std::vector<bool>& pred_present, const std::vector<bool>& gt_present) {
    return f1(count_detections(pred_present, gt_present));
}

inline double euclidean(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

/// Weights for the single per-class score combining Dice and detection F1.
struct ScoreWeights {
    double dice = 0.75;
    double f1 = 0.25;
};

inline double weighted_score(double dice_mean, double f1_value, const ScoreWeights& w) {
    return w.dice * dice_mean + w.f1 * f1_value;
}

}  // namespace ftk::metrics
