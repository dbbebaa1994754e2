#pragma once

// Multi-scale overlapping-patch planning and prediction stitching.
//
// A prediction at one scale is produced by resizing the image to a square
// `scale` x `scale`, running the model on `patch` x `patch` tiles, averaging
// overlapping tile outputs, and resizing the result back to the original
// resolution. Scales are fused by averaging.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fundus_tk/core.hpp"
#include "fundus_tk/preprocess.hpp"

namespace ftk::tiler {

inline constexpr int kDefaultPatch = 288;
inline constexpr std::array<int, 3> kDefaultScales{288, 294, 302};

struct TileOffset {
    int x0 = 0;
    int y0 = 0;

    friend auto operator<=>(const TileOffset&, const TileOffset&) = default;
};

struct TilePlan {
    int scale = 0;
    int patch = 0;
    int stride = 0;
    std::vector<TileOffset> tiles;  // row-major order: y0 then x0

    bool contains(const TileOffset& o) const {
        return std::ranges::find(tiles, o) != tiles.end();
    }
};

/// Offsets 0, stride, 2*stride, ... along one axis, with a final offset
/// clamped to size - patch so that the far edge is covered.
inline std::vector<int> axis_offsets(int size, int patch, int stride) {
    std::vector<int> out;
    for (int o = 0; o + patch <= size; o += stride) out.push_back(o);
    if (out.back() != size - patch) out.push_back(size - patch);
    return out;
}

inline TilePlan plan_tiles(int scaled_size, int patch, int stride) {
    if (patch < 1) throw ParameterError("plan_tiles: patch must be >= 1");
    if (stride < 1) throw ParameterError("plan_tiles: stride must be >= 1");
    if (stride > patch) throw ParameterError("plan_tiles: stride larger than patch leaves gaps");
    if (patch > scaled_size) throw ParameterError("plan_tiles: patch larger than scaled image");

    TilePlan plan{scaled_size, patch, stride, {}};
    const auto offsets = axis_offsets(scaled_size, patch, stride);
    for (int y0 : offsets)
        for (int x0 : offsets) plan.tiles.push_back({x0, y0});
    return plan;
}

/// Minimal overlapping cover: stride = scale - patch (two offsets per axis),
/// or a single tile when the scale equals the patch size.
inline TilePlan default_plan(int scaled_size, int patch = kDefaultPatch) {
    return plan_tiles(scaled_size, patch, std::max(1, scaled_size - patch));
}

struct Tile {
    TileOffset offset;
    ProbMap values;
};

/// Cuts a scale-resolution map into the tiles of a plan.
inline std::vector<Tile> slice_tiles(const ProbMap& scaled, const TilePlan& plan) {
    require_same_size(scaled.width(), scaled.height(), plan.scale, plan.scale, "slice_tiles");
    std::vector<Tile> out;
    out.reserve(plan.tiles.size());
    for (const auto& o : plan.tiles) {
        std::vector<double> v(static_cast<std::size_t>(plan.patch) * plan.patch);
        for (int y = 0; y < plan.patch; ++y)
            for (int x = 0; x < plan.patch; ++x)
                v[static_cast<std::size_t>(y) * plan.patch + x] = scaled.at(o.x0 + x, o.y0 + y);
        out.push_back({o, ProbMap(plan.patch, plan.patch, std::move(v))});
    }
    return out;
}

namespace detail {

// Total order on tiles so that accumulation order, and therefore every
// floating-point sum, is independent of the caller's tile order.
inline bool tile_less(const Tile* a, const Tile* b) {
    if (a->offset != b->offset) return a->offset < b->offset;
    return std::ranges::lexicographical_compare(a->values.values(), b->values.values());
}

}  // namespace detail

/// Averages tiles at scale resolution (sum / count per pixel), then resizes
/// bilinearly to (out_w, out_h).
inline ProbMap stitch(std::span<const Tile> tiles, const TilePlan& plan, int out_w, int out_h) {
    const int n = plan.scale;
    std::vector<const Tile*> ordered;
    ordered.reserve(tiles.size());
    for (const auto& t : tiles) {
        if (t.values.width() != plan.patch || t.values.height() != plan.patch) {
            throw ParameterError("stitch: tile size does not match plan patch size");
        }
        if (!plan.contains(t.offset)) throw ParameterError("stitch: tile offset not part of plan");
        ordered.push_back(&t);
    }
    std::ranges::sort(ordered, detail::tile_less);

    std::vector<double> sum(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<int> count(sum.size(), 0);
    for (const Tile* t : ordered) {
        for (int y = 0; y < plan.patch; ++y) {
            for (int x = 0; x < plan.patch; ++x) {
                const std::size_t i = static_cast<std::size_t>(t->offset.y0 + y) * n + (t->offset.x0 + x);
                sum[i] += t->values.at(x, y);
                ++count[i];
            }
        }
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (count[i] == 0) {
            throw IntegrityError("stitch: pixel (" + std::to_string(i % n) + "," + std::to_string(i / n) +
                                 ") not covered by any tile");
        }
        sum[i] = std::clamp(sum[i] / count[i], 0.0, 1.0);
    }
    return preprocess::resize(ProbMap(n, n, std::move(sum)), out_w, out_h);
}

/// Per-pixel arithmetic mean of equally sized maps.
inline ProbMap ensemble_average(std::span<const ProbMap> maps) {
    if (maps.empty()) throw ParameterError("ensemble_average: need at least one map");
    const int w = maps.front().width();
    const int h = maps.front().height();
    for (const auto& m : maps) require_same_size(m.width(), m.height(), w, h, "ensemble_average");
    if (maps.size() == 1) return maps.front();

    std::vector<double> acc(maps.front().values().size(), 0.0);
    for (const auto& m : maps) {
        const auto v = m.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    const double n = static_cast<double>(maps.size());
    for (double& a : acc) a = std::clamp(a / n, 0.0, 1.0);
    return ProbMap(w, h, std::move(acc));
}

/// Mirrors columns.
inline ProbMap hflip(const ProbMap& map) {
    std::vector<double> v(map.values().size());
    const int w = map.width();
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < w; ++x) v[static_cast<std::size_t>(y) * w + x] = map.at(w - 1 - x, y);
    return ProbMap(w, map.height(), std::move(v));
}

/// Stitches each scale to (out_w, out_h) and averages across scales.
struct ScaleTiles {
    TilePlan plan;
    std::vector<Tile> tiles;
};

inline ProbMap fuse_scales(std::span<const ScaleTiles> scales, int out_w, int out_h) {
    std::vector<ProbMap> per_scale;
    per_scale.reserve(scales.size());
    for (const auto& s : scales) per_scale.push_back(stitch(s.tiles, s.plan, out_w, out_h));
    return ensemble_average(per_scale);
}

}  // namespace ftk::tiler
