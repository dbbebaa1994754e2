// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "fundus_tk/evaluate.hpp"
#include "fundus_tk/losses.hpp"
#include "fundus_tk/metrics.hpp"
#include "fundus_tk/postprocess.hpp"
#include "fundus_tk/preprocess.hpp"
#include "fundus_tk/sampler.hpp"
#include "fundus_tk/tiler.hpp"
#include "oracles.hpp"

namespace {

using namespace ftk;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kF1Decimals = 5e-5;  // agreement to four decimals
constexpr double kF1BudgetMs = 1.0;
constexpr double kAucTol = 1e-12;
constexpr double kAucBudgetMs = 5000.0;
constexpr double kDiceIouTol = 1e-12;
constexpr double kLovaszTol = 1e-9;
constexpr double kFoveaTolPx = 1.0;
constexpr double kStitchTol = 1e-12;
constexpr double kScheduleTol = 1e-12;
constexpr double kShareTol = 0.02;
constexpr double kGrayTol = 1.0;
constexpr double kSuiteBudgetMs = 60000.0;

struct Check {
    bool ok = true;
    std::string why;

    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            why = msg;
        }
    }
};

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int> bits(std::mt19937_64& rng, std::size_t n, double p) {
    std::bernoulli_distribution b(p);
    std::vector<int> y(n);
    for (auto& v : y) v = b(rng);
    return y;
}

Check detection_f1_fixtures() {
    Check c;
    const auto t0 = Clock::now();
    const double a = metrics::f1({6, 0, 6, 0});
    const double b = metrics::f1({6, 0, 5, 0});
    const double elapsed = ms_since(t0);
    c.require(std::abs(a - 0.6667) <= kF1Decimals, "TP6/FP0/FN6 gave " + std::to_string(a));
    c.require(std::abs(b - 0.7059) <= kF1Decimals, "TP6/FP0/FN5 gave " + std::to_string(b));
    c.require(elapsed < kF1BudgetMs, "took " + std::to_string(elapsed) + " ms");
    return c;
}

Check auc_oracle() {
    Check c;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> level(0, 19);
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const bool ties = trial % 5 == 0;
        std::vector<double> s(200);
        std::vector<int> y;
        do y = bits(rng, 200, 0.3);
        while (std::ranges::count(y, 1) == 0 || std::ranges::count(y, 0) == 0);
        for (auto& v : s) v = ties ? level(rng) / 19.0 : u(rng);
        const double got = metrics::auc(s, y);
        c.require(std::abs(got - ftk::oracle::auc_pairs(s, y)) <= kAucTol, "oracle mismatch at trial " + std::to_string(trial));
        std::vector<double> affine(s.size()), cubic(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            affine[i] = 2.5 * s[i] + 1.0;
            cubic[i] = s[i] * s[i] * s[i];
        }
        c.require(metrics::auc(affine, y) == got, "affine transform changed AUC");
        c.require(metrics::auc(cubic, y) == got, "cubic transform changed AUC");
    }
    const double elapsed = ms_since(t0);
    c.require(elapsed < kAucBudgetMs, "took " + std::to_string(elapsed) + " ms");
    return c;
}

Check dice_oracle() {
    Check c;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    int excluded = 0;
    for (int trial = 0; trial < 500 && c.ok; ++trial) {
        // every tenth pair has an empty ground truth
        const auto p = ftk::oracle::random_mask(rng, 64, 64, u(rng));
        const auto g = trial % 10 == 0 ? BinaryMask(64, 64) : ftk::oracle::random_mask(rng, 64, 64, u(rng));
        const auto d = metrics::dice(p, g);
        const double ref = ftk::oracle::dice_pixels(p, g);
        if (ref < 0) {
            c.require(!d.has_value(), "empty ground truth not excluded");
            ++excluded;
            continue;
        }
        c.require(d.has_value() && *d == ref, "Dice differs from pixel oracle at trial " + std::to_string(trial));
        const double j = *metrics::iou(p, g);
        c.require(std::abs(*d - 2.0 * j / (1.0 + j)) <= kDiceIouTol, "Dice/IoU identity violated");
    }
    c.require(excluded == 50, "expected 50 excluded pairs, saw " + std::to_string(excluded));
    return c;
}

Check lovasz_vertices() {
    Check c;
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const auto y = bits(rng, 16, 0.4);
        const auto pred = bits(rng, 16, 0.4);
        // hinge errors land on {0, 1}: margin 2 for correct pixels, score 0 for mistakes
        std::vector<double> s(16);
        for (std::size_t i = 0; i < 16; ++i) s[i] = pred[i] == y[i] ? 2.0 * (2 * y[i] - 1) : 0.0;
        const double expected = std::ranges::count(y, 1) == 0 ? 0.0 : 1.0 - ftk::oracle::iou_labels(pred, y);
        const double got = losses::lovasz_binary(s, y);
        c.require(std::abs(got - expected) <= kLovaszTol,
                  "trial " + std::to_string(trial) + ": " + std::to_string(got) + " vs " + std::to_string(expected));
    }
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::uniform_int_distribution<int> pick(0, 15);
    for (int probe = 0; probe < 200 && c.ok; ++probe) {
        const auto y = bits(rng, 16, 0.4);
        std::vector<double> e(16);
        for (auto& v : e) v = u(rng);
        const double base = losses::lovasz_extension(e, y);
        e[pick(rng)] += u(rng);
        c.require(losses::lovasz_extension(e, y) >= base - 1e-12, "not monotone at probe " + std::to_string(probe));
    }
    return c;
}

Check fovea_round_trip() {
    Check c;
    const int n = 288;
    for (double r : {25.0, 75.0}) {
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const Point center{r + (n - 1 - 2 * r) * i / 9.0 + 0.37 * (j % 3), r + (n - 1 - 2 * r) * j / 9.0 + 0.21 * (i % 4)};
                const auto mask = postprocess::rasterize_fovea(center, r, n, n);
                std::vector<double> v(mask.bits().size());
                for (std::size_t k = 0; k < v.size(); ++k) v[k] = mask.bits()[k] ? 0.95 : 0.02;
                const auto p = postprocess::extract_fovea(ProbMap(n, n, std::move(v)), 0.5);
                const double err = p ? metrics::euclidean(*p, center) : 1e9;
                c.require(err <= kFoveaTolPx, "radius " + std::to_string(r) + " error " + std::to_string(err));
            }
    }
    return c;
}

Check fallback_scenarios() {
    Check c;
    for (auto [w, h] : {std::pair{1444, 1444}, std::pair{2124, 2156}}) {
        const auto meta = make_meta("img", w, h);
        postprocess::FoveaStats stats;
        stats.set(meta.group(), {236.0, -24.0, 15.0, 10.0, 2.0});

        BinaryMask disc(w, h);
        for (int y = 1040; y <= 1060; ++y)
            for (int x = 990; x <= 1010; ++x) disc.set(x, y);
        const auto dc = *centroid(disc);
        const ProbMap empty(w, h, 0.0);
        const auto with_disc = postprocess::localize_fovea(empty, disc, stats, meta, 0.5);
        c.require(with_disc == (Point{dc.x + 236.0, dc.y - 24.0}), meta.group() + ": disc-offset fallback not exact");

        const auto centre = postprocess::localize_fovea(empty, BinaryMask(w, h), stats, meta, 0.5);
        c.require(centre == (Point{w / 2.0, h / 2.0}), meta.group() + ": image-centre fallback not exact");

        const Point blob{dc.x + 236.0 + 10 * 15.0, dc.y - 24.0};
        const auto blob_mask = postprocess::rasterize_fovea(blob, 20.0, w, h);
        c.require(blob_mask.count() > 1000, meta.group() + ": blob fell outside the image");
        std::vector<double> v(blob_mask.bits().begin(), blob_mask.bits().end());
        const auto est = postprocess::localize_fovea_detailed(ProbMap(w, h, std::move(v)), disc, stats, meta, 0.5);
        c.require(est.source == postprocess::FoveaSource::disc_offset && est.location == with_disc,
                  meta.group() + ": 10-sigma blob not rejected");
    }
    return c;
}

Check stitch_round_trip() {
    Check c;
    std::mt19937_64 rng(404);
    const auto map = ftk::oracle::random_map(rng, 302, 302);
    const auto plan = tiler::default_plan(302);
    auto tiles = tiler::slice_tiles(map, plan);
    const auto out = tiler::stitch(tiles, plan, 302, 302);
    double worst = 0;
    for (std::size_t i = 0; i < map.values().size(); ++i)
        worst = std::max(worst, std::abs(out.values()[i] - map.values()[i]));
    c.require(worst <= kStitchTol, "round trip error " + std::to_string(worst));

    const auto small = tiler::plan_tiles(12, 8, 4);
    const std::vector<tiler::Tile> consts{{{0, 0}, ProbMap(8, 8, 0.2)},
                                          {{4, 0}, ProbMap(8, 8, 0.6)},
                                          {{0, 4}, ProbMap(8, 8, 0.2)},
                                          {{4, 4}, ProbMap(8, 8, 0.6)}};
    const auto avg = tiler::stitch(consts, small, 12, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 4; x < 8; ++x) c.require(avg.at(x, y) == 0.4, "overlap of 0.2 and 0.6 is not exactly 0.4");

    std::vector<tiler::Tile> noisy;
    for (const auto& o : plan.tiles) noisy.push_back({o, ftk::oracle::random_map(rng, 288, 288)});
    const auto ref = io::encode_pmap(io::from_probmap(tiler::stitch(noisy, plan, 302, 302)));
    const auto ref64 = tiler::stitch(noisy, plan, 302, 302);
    for (int k = 0; k < 5; ++k) {
        std::ranges::shuffle(noisy, rng);
        const auto again = tiler::stitch(noisy, plan, 302, 302);
        c.require(again == ref64, "stitched values depend on tile order");
        c.require(io::encode_pmap(io::from_probmap(again)) == ref, "stitched bytes depend on tile order");
    }
    return c;
}

Check sampler_schedule() {
    Check c;
    const sampler::ScheduleConfig cfg{};
    c.require(sampler::minority_fraction(0, cfg) == 0.5, "f(0) != 0.5");
    c.require(std::abs(sampler::minority_fraction(5, cfg) - 0.3825) <= kScheduleTol, "f(5) != 0.3825");
    c.require(std::abs(sampler::minority_fraction(30, cfg) - (0.03 + 0.47 * std::pow(0.75, 6))) <= kScheduleTol,
              "f(30) off formula");
    c.require(std::abs(sampler::minority_fraction(30, cfg) - 0.11365) <= 5e-6, "f(30) not ~0.11365");
    for (int e = 1; e <= 100; ++e)
        c.require(sampler::minority_fraction(e, cfg) <= sampler::minority_fraction(e - 1, cfg), "schedule increases");

    const sampler::ScheduleConfig seeded{.seed = 2024};
    c.require(sampler::epoch_draws(30, 970, 7, seeded) == sampler::epoch_draws(30, 970, 7, seeded),
              "seeded draws not reproducible");
    for (int epoch : {0, 5, 30}) {
        const auto draws = sampler::epoch_draws(100, 9900, epoch, seeded);
        const double share =
            static_cast<double>(std::count_if(draws.begin(), draws.end(), [](const auto& d) { return d.minority; })) / draws.size();
        c.require(draws.size() == 10000 && std::abs(share - sampler::minority_fraction(epoch, seeded)) <= kShareTol,
                  "epoch " + std::to_string(epoch) + " share " + std::to_string(share));
    }
    return c;
}

Check illumination() {
    Check c;
    const auto flat = preprocess::illumination_correct(Raster(64, 64, 3, 173), 4.0, 4.0, 128);
    c.require(flat == Raster(64, 64, 3, 128), "constant image not mapped to offset");

    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> u(0, 255);
    const int n = 64, k = 3, margin = 8;
    Raster a(n, n, 1);
    for (auto& v : a.data()) v = static_cast<std::uint8_t>(u(rng));
    Raster b(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) b.at(x, y) = a.at(std::max(0, x - k), std::max(0, y - k));
    const auto oa = preprocess::illumination_correct(a, 2.0, 4.0, 128);
    const auto ob = preprocess::illumination_correct(b, 2.0, 4.0, 128);
    for (int y = margin + k; y < n - margin; ++y)
        for (int x = margin + k; x < n - margin; ++x)
            c.require(ob.at(x, y) == oa.at(x - k, y - k), "interior not translation-equivariant");

    for (double sigma : {1.0, 3.0, 40.0}) {
        Raster img(11, 11, 1);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(u(rng));
        std::vector<double> plane(img.data().begin(), img.data().end());
        const auto bg = ftk::oracle::dense_gaussian(plane, 11, 11, sigma);
        const auto out = preprocess::illumination_correct(img, sigma, 4.0, 128);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            const double expected = std::clamp(4.0 * (plane[i] - bg[i]) + 128.0, 0.0, 255.0);
            c.require(std::abs(out.data()[i] - expected) <= kGrayTol, "dense oracle disagreement");
        }
    }
    return c;
}

Check end_to_end() {
    Check c;
    std::mt19937_64 rng(606);
    const auto dir = ftk::fixture::temp_dir("acceptance_e2e");
    const auto run = ftk::fixture::make_run(rng, 12, 96, 80);
    ftk::fixture::write_run(dir / "gt", run, "label");
    ftk::fixture::write_run(dir / "pred", run);
    const auto r = eval::evaluate_run(dir / "pred", dir / "gt");
    c.require(!r.incomplete(), "report incomplete");
    c.require(r.auc && *r.auc == 1.0, "AUC != 1");
    c.require(r.fovea_mean_euclidean && *r.fovea_mean_euclidean == 0.0, "Euclidean != 0");
    for (const auto& cls : r.classes) {
        c.require(cls.evaluated && cls.n_images == 12, cls.name + " not evaluated on 12 images");
        c.require(cls.dice_mean && *cls.dice_mean == 1.0, cls.name + " Dice != 1");
        c.require(cls.f1_detection == 1.0, cls.name + " F1 != 1");
    }
    std::filesystem::remove_all(dir);
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Check()> fn;
    };
    const std::vector<Criterion> criteria{
        {"detection F1 count fixtures", detection_f1_fixtures},
        {"AUC oracle equivalence and monotone invariance", auc_oracle},
        {"Dice oracle, Dice/IoU identity, empty-GT exclusion", dice_oracle},
        {"Lovasz vertex identity and monotonicity", lovasz_vertices},
        {"fovea rasterize/extract round trip", fovea_round_trip},
        {"fovea fallback scenarios", fallback_scenarios},
        {"stitch round trip, overlap average, order independence", stitch_round_trip},
        {"sampler schedule and draws", sampler_schedule},
        {"illumination correction", illumination},
        {"end-to-end evaluate on identical predictions", end_to_end},
    };

    const auto suite_start = Clock::now();
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Check c;
        try {
            c = criteria[i].fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.why = std::string("exception: ") + e.what();
        }
        const double ms = ms_since(t0);
        if (i + 1 == criteria.size()) {
            const double total = ms_since(suite_start);
            c.require(total < kSuiteBudgetMs, "suite took " + std::to_string(total) + " ms");
        }
        failures += !c.ok;
        std::printf("%s %2zu %s (%.1f ms)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].name, ms,
                    c.ok ? "" : ": ", c.why.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
