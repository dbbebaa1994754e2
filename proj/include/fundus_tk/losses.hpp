#pragma once

// Forward values of the segmentation/classification training losses.
// No gradients: these exist for parity checks against training code.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "fundus_tk/errors.hpp"

namespace ftk::losses {

inline constexpr double kBceEpsilon = 1e-7;

namespace detail {

inline void check_pair(std::size_t np, std::span<const int> y, const char* what) {
    if (np == 0) throw ParameterError(std::string(what) + ": empty input");
    if (np != y.size()) throw ParameterError(std::string(what) + ": length mismatch");
    for (int v : y)
        if (v != 0 && v != 1) throw ParameterError(std::string(what) + ": labels must be 0 or 1");
}

}  // namespace detail

/// Mean binary cross-entropy with probabilities clipped to [eps, 1 - eps].
inline double bce(std::span<const double> p, std::span<const int> y) {
    detail::check_pair(p.size(), y, "bce");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], kBceEpsilon, 1.0 - kBceEpsilon);
        acc += y[i] ? std::log(q) : std::log(1.0 - q);
    }
    return -acc / static_cast<double>(p.size());
}

/// 1 - (2 sum(p y) + smooth) / (sum(p) + sum(y) + smooth).
inline double dice_loss(std::span<const double> p, std::span<const int> y, double smooth = 1.0) {
    detail::check_pair(p.size(), y, "dice_loss");
    double inter = 0.0;
    double sp = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        inter += p[i] * y[i];
        sp += p[i];
        sy += y[i];
    }
    const double denom = sp + sy + smooth;
    if (denom == 0.0) return 0.0;  // p and y all zero with smooth = 0: perfect agreement
    return 1.0 - (2.0 * inter + smooth) / denom;
}

/// Per-rank weights of the Lovasz extension for ground truth sorted by
/// decreasing error: successive differences of the Jaccard loss obtained by
/// treating each sorted prefix as the set of mispredicted pixels.
inline std::vector<double> lovasz_grad(std::span<const int> gt_sorted) {
    const double gts = std::accumulate(gt_sorted.begin(), gt_sorted.end(), 0.0);
    std::vector<double> g(gt_sorted.size());
    double cum_fg = 0.0;
    double cum_bg = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < gt_sorted.size(); ++i) {
        cum_fg += gt_sorted[i];
        cum_bg += 1 - gt_sorted[i];
        const double inter = gts - cum_fg;
        const double uni = gts + cum_bg;
        const double jac = 1.0 - inter / uni;
        g[i] = jac - prev;
        prev = jac;
    }
    return g;
}

/// Lovasz extension of the Jaccard loss evaluated at a non-negative error
/// vector. Returns 0 when the ground truth has no foreground.
inline double lovasz_extension(std::span<const double> errors, std::span<const int> y) {
    detail::check_pair(errors.size(), y, "lovasz_extension");
    if (std::ranges::count(y, 1) == 0) return 0.0;

    std::vector<std::size_t> order(errors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return errors[a] > errors[b]; });

    std::vector<int> gt_sorted(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) gt_sorted[i] = y[order[i]];
    const auto grad = lovasz_grad(gt_sorted);

    double loss = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) loss += std::max(0.0, errors[order[i]]) * grad[i];
    return loss;
}

/// Hinge errors max(0, 1 - s * (2y - 1)).
inline std::vector<double> hinge_errors(std::span<const double> scores, std::span<const int> y) {
    detail::check_pair(scores.size(), y, "hinge_errors");
    std::vector<double> m(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        m[i] = std::max(0.0, 1.0 - scores[i] * (2.0 * y[i] - 1.0));
    }
    return m;
}

/// Binary Lovasz hinge: the Jaccard-loss surrogate on real-valued scores.
inline double lovasz_binary(std::span<const double> scores, std::span<const int> y) {
    const auto m = hinge_errors(scores, y);
    return lovasz_extension(m, y);
}

/// Multi-class composition: binary Lovasz hinge per class (one-vs-rest on
/// class_scores[c]) averaged over the classes present in the labels.
/// Returns 0 when no class is present.
inline double lovasz_multiclass(std::span<const std::vector<double>> class_scores, std::span<const int> labels) {
    double total = 0.0;
    int present = 0;
    std::vector<int> fg(labels.size());
    for (std::size_t c = 0; c < class_scores.size(); ++c) {
        for (std::size_t i = 0; i < labels.size(); ++i) fg[i] = labels[i] == static_cast<int>(c);
        if (std::ranges::count(fg, 1) == 0) continue;
        total += lovasz_binary(class_scores[c], fg);
        ++present;
    }
    return present == 0 ? 0.0 : total / present;
}

}  // namespace ftk::losses
