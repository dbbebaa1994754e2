// Runs the post-processing chain on synthetic model outputs and scores it.
//
//   tiles at three scales -> stitched maps -> disc/atrophy fusion ->
//   detachment rule -> fovea localisation -> metrics

#include <cstdio>
#include <random>

#include "fundus_tk/metrics.hpp"
#include "fundus_tk/postprocess.hpp"
#include "fundus_tk/tiler.hpp"

using namespace ftk;

namespace {

ProbMap soft_disc(Point c, double r, int w, int h, double noise, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-noise, noise);
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double d = std::hypot(x - c.x, y - c.y);
            const double p = 1.0 / (1.0 + std::exp((d - r) / 2.0));
            v[static_cast<std::size_t>(y) * w + x] = std::clamp(p + u(rng), 0.0, 1.0);
        }
    return ProbMap(w, h, std::move(v));
}

// What a tiled network would emit: the map resized to each scale and cut into patches.
ProbMap through_tiles(const ProbMap& truth, int w, int h) {
    std::vector<tiler::ScaleTiles> scales;
    for (int s : tiler::kDefaultScales) {
        const auto plan = tiler::default_plan(s);
        scales.push_back({plan, tiler::slice_tiles(preprocess::resize(truth, s, s), plan)});
    }
    return tiler::fuse_scales(scales, w, h);
}

}  // namespace

int main() {
    const int w = 720, h = 720;
    const auto meta = make_meta("demo", w, h);
    std::mt19937_64 rng(17);

    const Point disc_c{250, 380}, atrophy_c{275, 380}, fovea_c{500, 360};
    const auto disc_p = through_tiles(soft_disc(disc_c, 45, w, h, 0.05, rng), w, h);
    const auto atrophy_p = through_tiles(soft_disc(atrophy_c, 30, w, h, 0.05, rng), w, h);
    const auto fovea_p = through_tiles(soft_disc(fovea_c, 25, w, h, 0.05, rng), w, h);

    const auto fused = postprocess::fuse_disc_atrophy(disc_p, atrophy_p, 0.5);

    postprocess::FoveaStats stats;
    stats.set(meta.group(), {245.0, -20.0, 30.0, 20.0, 2.0});
    const auto est = postprocess::localize_fovea_detailed(fovea_p, fused.disc, stats, meta, 0.5);

    BinaryMask det(w, h);
    for (int y = 0; y < h / 2; ++y)
        for (int x = 0; x < w; ++x) det.set(x, y);
    const auto det_fixed = postprocess::detachment_fix(det);

    const auto disc_gt = postprocess::rasterize_fovea(disc_c, 45, w, h);
    std::printf("disc pixels      %zu (dice vs circle %.4f)\n", fused.disc.count(),
                metrics::dice(fused.disc, disc_gt).value_or(0.0));
    std::printf("atrophy pixels   %zu\n", fused.atrophy.count());
    std::printf("fovea            (%.2f, %.2f) via %s, error %.2f px\n", est.location.x, est.location.y,
                est.source == postprocess::FoveaSource::extracted ? "extraction" : "fallback",
                metrics::euclidean(est.location, fovea_c));
    std::printf("detachment area  %.2f -> %.2f\n", area_fraction(det), area_fraction(det_fixed));
    return 0;
}
