#pragma once

// Illumination correction and resampling of fundus images.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fundus_tk/core.hpp"

namespace ftk::preprocess {

struct IlluminationParams {
    double sigma = 0.0;  // <= 0 selects the default, width / 30
    double gain = 4.0;
    int offset = 128;
};

inline double default_sigma(int width) { return static_cast<double>(width) / 30.0; }

/// Sampled Gaussian truncated at radius ceil(3 sigma) and renormalized to unit sum.
inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("gaussian_kernel: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

/// Separable Gaussian blur of a single-channel plane with edge replication.
inline std::vector<double> gaussian_blur(const std::vector<double>& plane, int width, int height,
                                         double sigma) {
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    std::vector<double> tmp(plane.size());
    std::vector<double> out(plane.size());

    for (int y = 0; y < height; ++y) {
        const double* row = plane.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                const int sx = std::clamp(x + j, 0, width - 1);
                acc += k[static_cast<std::size_t>(j + r)] * row[sx];
            }
            tmp[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                const int sy = std::clamp(y + j, 0, height - 1);
                acc += k[static_cast<std::size_t>(j + r)] * tmp[static_cast<std::size_t>(sy) * width + x];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    return out;
}

/// Local contrast enhancement by background subtraction:
/// out = clamp(gain * (I - G_sigma(I)) + offset, 0, 255), applied per channel.
inline Raster illumination_correct(const Raster& image, double sigma, double gain, int offset) {
    if (!(sigma > 0.0)) throw ParameterError("illumination_correct: sigma must be > 0");
    if (offset < 0 || offset > 255) throw ParameterError("illumination_correct: offset must lie in [0,255]");

    const int w = image.width();
    const int h = image.height();
    const int nc = image.channels();
    Raster out(w, h, nc);
    std::vector<double> plane(static_cast<std::size_t>(w) * h);
    for (int c = 0; c < nc; ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) plane[static_cast<std::size_t>(y) * w + x] = image.at(x, y, c);
        const auto background = gaussian_blur(plane, w, h, sigma);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            const double v = gain * (plane[i] - background[i]) + offset;
            const auto x = static_cast<int>(i % static_cast<std::size_t>(w));
            const auto y = static_cast<int>(i / static_cast<std::size_t>(w));
            out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
        }
    }
    return out;
}

inline Raster illumination_correct(const Raster& image, const IlluminationParams& params = {}) {
    const double sigma = params.sigma > 0.0 ? params.sigma : default_sigma(image.width());
    return illumination_correct(image, sigma, params.gain, params.offset);
}

/// Luma (BT.601) grayscale; single-channel input is returned unchanged.
inline Raster to_gray(const Raster& image) {
    if (image.channels() == 1) return image;
    Raster out(image.width(), image.height(), 1);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const double v = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) + 0.114 * image.at(x, y, 2);
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Resampling. Pixel centers map through src = (dst + 0.5) * (src_n / dst_n) - 0.5.

enum class Interp { nearest, bilinear };

namespace detail {

inline void require_targets(int tw, int th) {
    if (tw < 1 || th < 1) throw ParameterError("resize: target dimensions must be >= 1");
}

inline int nearest_index(int dst, int src_n, int dst_n) {
    const double s = (dst + 0.5) * static_cast<double>(src_n) / static_cast<double>(dst_n);
    return std::clamp(static_cast<int>(std::floor(s)), 0, src_n - 1);
}

struct LinearTap {
    int i0;
    int i1;
    double t;
};

inline LinearTap linear_tap(int dst, int src_n, int dst_n) {
    double s = (dst + 0.5) * static_cast<double>(src_n) / static_cast<double>(dst_n) - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_n - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src_n - 1);
    return {i0, i1, s - i0};
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

/// Bilinear resampling of a row-major plane accessed through `sample(x, y)`.
template <typename Sample, typename Store>
void bilinear(int sw, int sh, int tw, int th, Sample&& sample, Store&& store) {
    std::vector<LinearTap> xs(static_cast<std::size_t>(tw));
    for (int x = 0; x < tw; ++x) xs[static_cast<std::size_t>(x)] = linear_tap(x, sw, tw);
    for (int y = 0; y < th; ++y) {
        const auto ty = linear_tap(y, sh, th);
        for (int x = 0; x < tw; ++x) {
            const auto& tx = xs[static_cast<std::size_t>(x)];
            const double top = lerp(sample(tx.i0, ty.i0), sample(tx.i1, ty.i0), tx.t);
            const double bottom = lerp(sample(tx.i0, ty.i1), sample(tx.i1, ty.i1), tx.t);
            store(x, y, lerp(top, bottom, ty.t));
        }
    }
}

}  // namespace detail

inline Raster resize(const Raster& image, int target_w, int target_h, Interp mode) {
    detail::require_targets(target_w, target_h);
    if (target_w == image.width() && target_h == image.height()) return image;

    Raster out(target_w, target_h, image.channels());
    if (mode == Interp::nearest) {
        for (int y = 0; y < target_h; ++y) {
            const int sy = detail::nearest_index(y, image.height(), target_h);
            for (int x = 0; x < target_w; ++x) {
                const int sx = detail::nearest_index(x, image.width(), target_w);
                for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = image.at(sx, sy, c);
            }
        }
        return out;
    }
    for (int c = 0; c < image.channels(); ++c) {
        detail::bilinear(
            image.width(), image.height(), target_w, target_h,
            [&](int x, int y) { return static_cast<double>(image.at(x, y, c)); },
            [&](int x, int y, double v) {
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
            });
    }
    return out;
}

inline ProbMap resize(const ProbMap& map, int target_w, int target_h, Interp mode = Interp::bilinear) {
    detail::require_targets(target_w, target_h);
    if (target_w == map.width() && target_h == map.height()) return map;

    std::vector<double> values(static_cast<std::size_t>(target_w) * target_h);
    if (mode == Interp::nearest) {
        for (int y = 0; y < target_h; ++y) {
            const int sy = detail::nearest_index(y, map.height(), target_h);
            for (int x = 0; x < target_w; ++x) {
                values[static_cast<std::size_t>(y) * target_w + x] =
                    map.at(detail::nearest_index(x, map.width(), target_w), sy);
            }
        }
    } else {
        detail::bilinear(
            map.width(), map.height(), target_w, target_h, [&](int x, int y) { return map.at(x, y); },
            [&](int x, int y, double v) {
                values[static_cast<std::size_t>(y) * target_w + x] = std::clamp(v, 0.0, 1.0);
            });
    }
    return ProbMap(target_w, target_h, std::move(values));
}

/// Masks always resample by nearest neighbour.
inline BinaryMask resize(const BinaryMask& mask, int target_w, int target_h) {
    detail::require_targets(target_w, target_h);
    if (target_w == mask.width() && target_h == mask.height()) return mask;
    BinaryMask out(target_w, target_h);
    for (int y = 0; y < target_h; ++y) {
        const int sy = detail::nearest_index(y, mask.height(), target_h);
        for (int x = 0; x < target_w; ++x) {
            out.set(x, y, mask.get(detail::nearest_index(x, mask.width(), target_w), sy));
        }
    }
    return out;
}

}  // namespace ftk::preprocess
