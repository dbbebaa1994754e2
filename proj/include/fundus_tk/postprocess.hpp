#pragma once

// Anatomy-driven cleanup of raw predictions: disc/atrophy mutual exclusion,
// the large-detachment replacement rule, and fovea localization with an
// optic-disc based plausibility check and fallback.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fundus_tk/core.hpp"

namespace ftk::postprocess {

/// Fovea-minus-disc-centroid offset statistics for one resolution group.
struct FoveaGroupStats {
    double mean_dx = 0.0;
    double mean_dy = 0.0;
    double sd_dx = 0.0;
    double sd_dy = 0.0;
    double k = 2.0;  // tolerance multiplier on the standard deviations
};

class FoveaStats {
public:
    void set(const std::string& group, const FoveaGroupStats& s) {
        if (!(s.sd_dx >= 0.0) || !(s.sd_dy >= 0.0)) {
            throw ConfigError("fovea stats for group " + group + ": standard deviations must be >= 0");
        }
        if (!(s.k >= 0.0)) throw ConfigError("fovea stats for group " + group + ": k must be >= 0");
        groups_[group] = s;
    }

    bool contains(const std::string& group) const { return groups_.contains(group); }

    const FoveaGroupStats& at(const std::string& group) const {
        auto it = groups_.find(group);
        if (it == groups_.end()) throw ConfigError("no fovea statistics for resolution group " + group);
        return it->second;
    }

    const std::map<std::string, FoveaGroupStats>& groups() const noexcept { return groups_; }

private:
    std::map<std::string, FoveaGroupStats> groups_;
};

/// One training label: the disc centroid and the annotated fovea of an image.
struct FoveaSample {
    std::string group;
    Point disc_centroid;
    Point fovea;
};

/// Per-group mean and sample standard deviation (n - 1) of fovea - disc offsets.
/// Groups with a single sample get zero deviation.
inline FoveaStats estimate_fovea_stats(std::span<const FoveaSample> samples, double k = 2.0) {
    struct Acc {
        std::vector<double> dx, dy;
    };
    std::map<std::string, Acc> acc;
    for (const auto& s : samples) {
        acc[s.group].dx.push_back(s.fovea.x - s.disc_centroid.x);
        acc[s.group].dy.push_back(s.fovea.y - s.disc_centroid.y);
    }
    auto mean_sd = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{m, sd};
    };
    FoveaStats stats;
    for (const auto& [group, a] : acc) {
        const auto [mx, sx] = mean_sd(a.dx);
        const auto [my, sy] = mean_sd(a.dy);
        stats.set(group, {mx, my, sx, sy, k});
    }
    return stats;
}

struct FusedSegmentation {
    BinaryMask disc;
    BinaryMask atrophy;
};

/// Per-pixel argmax between disc and atrophy (ties go to disc), gated by t.
inline FusedSegmentation fuse_disc_atrophy(const ProbMap& disc_p, const ProbMap& atrophy_p, double t) {
    require_same_size(disc_p.width(), disc_p.height(), atrophy_p.width(), atrophy_p.height(),
                      "fuse_disc_atrophy");
    if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("fuse_disc_atrophy: t must lie in [0,1]");

    const auto d = disc_p.values();
    const auto a = atrophy_p.values();
    std::vector<std::uint8_t> disc(d.size(), 0);
    std::vector<std::uint8_t> atrophy(d.size(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] >= a[i]) {
            disc[i] = d[i] >= t;
        } else {
            atrophy[i] = a[i] >= t;
        }
    }
    return {BinaryMask(disc_p.width(), disc_p.height(), std::move(disc)),
            BinaryMask(disc_p.width(), disc_p.height(), std::move(atrophy))};
}

inline constexpr double kDefaultDetachmentFraction = 0.30;

/// A detachment prediction covering at least `frac_threshold` of the image is
/// replaced by the full-image mask.
inline BinaryMask detachment_fix(const BinaryMask& det_mask, double frac_threshold = kDefaultDetachmentFraction) {
    if (!(frac_threshold > 0.0 && frac_threshold <= 1.0)) {
        throw ParameterError("detachment_fix: threshold must lie in (0,1]");
    }
    if (area_fraction(det_mask) >= frac_threshold) return BinaryMask(det_mask.width(), det_mask.height(), true);
    return det_mask;
}

/// Filled disc of the given radius, clipped to the image.
inline BinaryMask rasterize_fovea(const Point& center, double radius, int w, int h) {
    if (!is_finite(center)) throw ParameterError("rasterize_fovea: center must be finite");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("rasterize_fovea: radius must be > 0");

    BinaryMask mask(w, h);
    const double r2 = radius * radius;
    const int y_lo = std::max(0, static_cast<int>(std::floor(center.y - radius)));
    const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(center.y + radius)));
    const int x_lo = std::max(0, static_cast<int>(std::floor(center.x - radius)));
    const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(center.x + radius)));
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - center.x;
            const double dy = y - center.y;
            if (dx * dx + dy * dy <= r2) mask.set(x, y);
        }
    }
    return mask;
}

/// Centroid of the largest connected component of the thresholded map.
inline std::optional<Point> extract_fovea(const ProbMap& fovea_p, double t) {
    const auto mask = threshold(fovea_p, t);
    const auto labeling = label_components(mask);
    if (labeling.components.empty()) return std::nullopt;
    return centroid(labeling.component_mask(labeling.components.front().label));
}

/// Componentwise closed-interval check of the fovea-minus-disc offset against
/// mean +/- k * sd of the resolution group.
inline bool sanity_check_fovea(const Point& fovea, const Point& disc_centroid, const FoveaStats& stats,
                               const std::string& group) {
    const auto& s = stats.at(group);
    const double dx = fovea.x - disc_centroid.x;
    const double dy = fovea.y - disc_centroid.y;
    return std::abs(dx - s.mean_dx) <= s.k * s.sd_dx && std::abs(dy - s.mean_dy) <= s.k * s.sd_dy;
}

/// Disc centroid shifted by the group's mean offset, or the image center when
/// no disc is visible.
inline Point fallback_fovea(const std::optional<Point>& disc_centroid, const FoveaStats& stats,
                            const std::string& group, int w, int h) {
    if (!disc_centroid) return {w / 2.0, h / 2.0};
    const auto& s = stats.at(group);
    return {disc_centroid->x + s.mean_dx, disc_centroid->y + s.mean_dy};
}

enum class FoveaSource { extracted, disc_offset, image_center };

struct FoveaEstimate {
    Point location;
    FoveaSource source = FoveaSource::extracted;
};

/// Full localization pipeline: extract, validate against the disc, fall back.
inline FoveaEstimate localize_fovea_detailed(const ProbMap& fovea_p, const BinaryMask& disc_mask,
                                             const FoveaStats& stats, const ImageMeta& meta, double t) {
    require_same_size(fovea_p.width(), fovea_p.height(), disc_mask.width(), disc_mask.height(),
                      "localize_fovea");
    require_same_size(fovea_p.width(), fovea_p.height(), meta.width, meta.height, "localize_fovea");

    const auto disc = centroid(disc_mask);
    const auto group = meta.group();
    const auto fallback = [&] {
        return FoveaEstimate{fallback_fovea(disc, stats, group, meta.width, meta.height),
                             disc ? FoveaSource::disc_offset : FoveaSource::image_center};
    };

    const auto found = extract_fovea(fovea_p, t);
    if (!found) return fallback();
    if (disc && !sanity_check_fovea(*found, *disc, stats, group)) return fallback();
    return {*found, FoveaSource::extracted};
}

inline Point localize_fovea(const ProbMap& fovea_p, const BinaryMask& disc_mask, const FoveaStats& stats,
                            const ImageMeta& meta, double t) {
    return localize_fovea_detailed(fovea_p, disc_mask, stats, meta, t).location;
}

}  // namespace ftk::postprocess
