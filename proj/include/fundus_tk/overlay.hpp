#pragma once

// Annotated rendering of a fundus image with its post-processed predictions:
// disc outlined green, atrophy white, detachment yellow, fovea as a purple cross.

#include <algorithm>
#include <optional>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "fundus_tk/core.hpp"
#include "fundus_tk/io.hpp"

namespace ftk::overlay {

struct OverlayInput {
    std::optional<BinaryMask> disc;
    std::optional<BinaryMask> atrophy;
    std::optional<BinaryMask> detachment;
    std::optional<Point> fovea;
};

// BGR
inline const cv::Scalar kDiscColor{0, 255, 0};
inline const cv::Scalar kAtrophyColor{255, 255, 255};
inline const cv::Scalar kDetachmentColor{0, 255, 255};
inline const cv::Scalar kFoveaColor{128, 0, 128};

inline void draw_outline(cv::Mat& canvas, const BinaryMask& mask, const cv::Scalar& color, int thickness) {
    if (mask.width() != canvas.cols || mask.height() != canvas.rows) {
        throw ParameterError("overlay: mask size differs from image size");
    }
    cv::Mat bin(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y) {
        auto* row = bin.ptr<std::uint8_t>(y);
        for (int x = 0; x < mask.width(); ++x) row[x] = mask.get(x, y) ? 255 : 0;
    }
    std::vector<std::vector<cv::Point>> contours;
    cv::findContours(bin, contours, cv::RETR_EXTERNAL, cv::CHAIN_APPROX_SIMPLE);
    cv::drawContours(canvas, contours, -1, color, thickness, cv::LINE_8);
}

/// BGR image ready for cv::imwrite.
inline cv::Mat render(const Raster& image, const OverlayInput& in) {
    cv::Mat canvas = io::mat_from_raster(image);
    if (canvas.channels() == 1) cv::cvtColor(canvas, canvas, cv::COLOR_GRAY2BGR);

    const int extent = std::max(canvas.cols, canvas.rows);
    const int thickness = std::max(1, extent / 300);
    if (in.detachment) draw_outline(canvas, *in.detachment, kDetachmentColor, thickness);
    if (in.atrophy) draw_outline(canvas, *in.atrophy, kAtrophyColor, thickness);
    if (in.disc) draw_outline(canvas, *in.disc, kDiscColor, thickness);
    if (in.fovea) {
        const cv::Point p(static_cast<int>(std::lround(in.fovea->x)), static_cast<int>(std::lround(in.fovea->y)));
        cv::drawMarker(canvas, p, kFoveaColor, cv::MARKER_CROSS, std::max(5, extent / 40), thickness + 1, cv::LINE_8);
    }
    return canvas;
}

}  // namespace ftk::overlay
