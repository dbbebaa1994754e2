#pragma once

// Pixel containers and mask algebra shared by every other module.
//
// Coordinates: x is the column index, y the row index, origin top-left.
// Pixel centers sit at integer coordinates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fundus_tk/errors.hpp"

namespace ftk {

namespace detail {

inline void require_dims(int width, int height, const char* what) {
    if (width < 1 || height < 1) {
        throw ParameterError(std::string(what) + ": width and height must be >= 1 (got " +
                             std::to_string(width) + "x" + std::to_string(height) + ")");
    }
}

inline std::size_t pixel_count(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace detail

/// 8-bit image grid, 1 (gray) or 3 (RGB) interleaved channels, row-major.
class Raster {
public:
    Raster(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        validate_shape();
        data_.assign(detail::pixel_count(width, height) * static_cast<std::size_t>(channels), fill);
    }

    Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
        validate_shape();
        if (data_.size() != detail::pixel_count(width, height) * static_cast<std::size_t>(channels)) {
            throw ParameterError("Raster: data length does not match width*height*channels");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }

    std::uint8_t at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    void validate_shape() const {
        detail::require_dims(width_, height_, "Raster");
        if (channels_ != 1 && channels_ != 3) {
            throw ParameterError("Raster: channels must be 1 or 3");
        }
    }

    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_;
    int height_;
    int channels_;
    std::vector<std::uint8_t> data_;
};

/// Per-pixel probability field; every value lies in [0,1].
class ProbMap {
public:
    ProbMap(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        detail::require_dims(width, height, "ProbMap");
        check_value(fill);
        values_.assign(detail::pixel_count(width, height), fill);
    }

    ProbMap(int width, int height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {
        detail::require_dims(width, height, "ProbMap");
        if (values_.size() != detail::pixel_count(width, height)) {
            throw ParameterError("ProbMap: value count does not match width*height");
        }
        for (double v : values_) check_value(v);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    double at(int x, int y) const noexcept {
        return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }

    void set(int x, int y, double v) {
        check_value(v);
        values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)] = v;
    }

    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const ProbMap&, const ProbMap&) = default;

private:
    static void check_value(double v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ParameterError("ProbMap: value outside [0,1]");
        }
    }

    int width_;
    int height_;
    std::vector<double> values_;
};

/// Boolean pixel grid, stored one byte per pixel (0 or 1).
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false) : width_(width), height_(height) {
        detail::require_dims(width, height, "BinaryMask");
        bits_.assign(detail::pixel_count(width, height), fill ? 1 : 0);
    }

    BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
        : width_(width), height_(height), bits_(std::move(bits)) {
        detail::require_dims(width, height, "BinaryMask");
        if (bits_.size() != detail::pixel_count(width, height)) {
            throw ParameterError("BinaryMask: bit count does not match width*height");
        }
        for (auto& b : bits_) b = b ? 1 : 0;
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool get(int x, int y) const noexcept { return bits_[offset(x, y)] != 0; }
    void set(int x, int y, bool v = true) noexcept { bits_[offset(x, y)] = v ? 1 : 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const noexcept {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }

    bool empty() const noexcept { return count() == 0; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t offset(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline bool is_finite(const Point& p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

enum class Angle { unknown, deg30, deg45 };
enum class Centering { unknown, macula, disc };

/// Resolution-group key, "WxH". Fovea statistics are tabulated per group.
inline std::string resolution_group(int width, int height) {
    return std::to_string(width) + "x" + std::to_string(height);
}

struct ImageMeta {
    std::string id;
    int width = 0;
    int height = 0;
    Angle angle = Angle::unknown;
    Centering centering = Centering::unknown;

    std::string group() const { return resolution_group(width, height); }
};

/// Builds metadata from image dimensions. The two camera settings of the
/// source device map to fixed resolutions (45 deg: 2124x2156, 30 deg: 1444x1444).
inline ImageMeta make_meta(std::string id, int width, int height,
                           Centering centering = Centering::unknown) {
    ImageMeta meta{std::move(id), width, height, Angle::unknown, centering};
    if (width == 2124 && height == 2156) meta.angle = Angle::deg45;
    if (width == 1444 && height == 1444) meta.angle = Angle::deg30;
    return meta;
}

inline void require_same_size(int w1, int h1, int w2, int h2, const char* what) {
    if (w1 != w2 || h1 != h2) {
        throw ParameterError(std::string(what) + ": dimension mismatch (" +
                             resolution_group(w1, h1) + " vs " + resolution_group(w2, h2) + ")");
    }
}

// ---------------------------------------------------------------------------
// Pixel-level operations

/// Sets a bit wherever the probability is >= t.
inline BinaryMask threshold(const ProbMap& map, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("threshold: t must lie in [0,1]");
    std::vector<std::uint8_t> bits(map.values().size());
    std::ranges::transform(map.values(), bits.begin(),
                           [t](double v) { return static_cast<std::uint8_t>(v >= t ? 1 : 0); });
    return BinaryMask(map.width(), map.height(), std::move(bits));
}

struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;  // inclusive
    int y_max = 0;  // inclusive

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Component {
    int label = 0;  // 1-based, raster-scan discovery order
    std::size_t pixel_count = 0;
    BoundingBox box;
};

/// Label image plus component summaries. labels[i] == 0 is background.
struct Labeling {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    std::vector<Component> components;  // sorted by pixel_count descending, then label

    /// Mask holding only the pixels of the component with the given label.
    BinaryMask component_mask(int label) const {
        std::vector<std::uint8_t> bits(labels.size());
        std::ranges::transform(labels, bits.begin(),
                               [label](int l) { return static_cast<std::uint8_t>(l == label); });
        return BinaryMask(width, height, std::move(bits));
    }
};

/// 8-connected component labeling.
inline Labeling label_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    Labeling out{w, h, std::vector<int>(detail::pixel_count(w, h), 0), {}};

    std::vector<std::pair<int, int>> stack;
    int next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.get(x, y) || out.labels[idx] != 0) continue;

            Component comp{++next_label, 0, {x, y, x, y}};
            out.labels[idx] = comp.label;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++comp.pixel_count;
                comp.box.x_min = std::min(comp.box.x_min, cx);
                comp.box.y_min = std::min(comp.box.y_min, cy);
                comp.box.x_max = std::max(comp.box.x_max, cx);
                comp.box.y_max = std::max(comp.box.y_max, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.get(nx, ny) && out.labels[n] == 0) {
                            out.labels[n] = comp.label;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
            out.components.push_back(comp);
        }
    }

    std::ranges::stable_sort(out.components, [](const Component& a, const Component& b) {
        return a.pixel_count > b.pixel_count;
    });
    return out;
}

inline std::vector<Component> connected_components(const BinaryMask& mask) {
    return label_components(mask).components;
}

/// Mean of foreground pixel-center coordinates; nullopt for an empty mask.
inline std::optional<Point> centroid(const BinaryMask& mask) {
    double sx = 0.0;
    double sy = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.get(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) return std::nullopt;
    return Point{sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

inline double area_fraction(const BinaryMask& mask) {
    return static_cast<double>(mask.count()) /
           static_cast<double>(detail::pixel_count(mask.width(), mask.height()));
}

inline BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a.width(), a.height(), b.width(), b.height(), "mask_union");
    std::vector<std::uint8_t> bits(a.bits().size());
    std::ranges::transform(a.bits(), b.bits(), bits.begin(),
                           [](std::uint8_t p, std::uint8_t q) { return static_cast<std::uint8_t>(p | q); });
    return BinaryMask(a.width(), a.height(), std::move(bits));
}

inline BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a.width(), a.height(), b.width(), b.height(), "mask_intersection");
    std::vector<std::uint8_t> bits(a.bits().size());
    std::ranges::transform(a.bits(), b.bits(), bits.begin(),
                           [](std::uint8_t p, std::uint8_t q) { return static_cast<std::uint8_t>(p & q); });
    return BinaryMask(a.width(), a.height(), std::move(bits));
}

/// Subset test: every bit of a is also set in b.
inline bool is_subset(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a.width(), a.height(), b.width(), b.height(), "is_subset");
    for (std::size_t i = 0; i < a.bits().size(); ++i) {
        if (a.bits()[i] && !b.bits()[i]) return false;
    }
    return true;
}

}  // namespace ftk
