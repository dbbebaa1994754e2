#include <gtest/gtest.h>

#include <random>

#include "fundus_tk/metrics.hpp"
#include "oracles.hpp"

namespace ftk::metrics {
namespace {

struct Instance {
    std::vector<double> s;
    std::vector<int> y;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n, bool ties) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> level(0, 9);
    Instance in;
    do {
        in.s.clear();
        in.y.clear();
        for (std::size_t i = 0; i < n; ++i) {
            in.s.push_back(ties ? level(rng) / 10.0 : u(rng));
            in.y.push_back(u(rng) < 0.4 ? 1 : 0);
        }
    } while (std::ranges::count(in.y, 1) == 0 || std::ranges::count(in.y, 0) == 0);
    return in;
}

TEST(Auc, Examples) {
    EXPECT_EQ(auc(std::vector{0.9, 0.8, 0.2, 0.1}, std::vector{1, 1, 0, 0}), 1.0);
    EXPECT_EQ(auc(std::vector{0.1, 0.2, 0.8, 0.9}, std::vector{1, 1, 0, 0}), 0.0);
    EXPECT_EQ(auc(std::vector{0.5, 0.5, 0.5, 0.5}, std::vector{1, 0, 1, 0}), 0.5);
}

TEST(Auc, SingleClassIsUndefined) {
    EXPECT_THROW(auc(std::vector{0.1, 0.4}, std::vector{1, 1}), UndefinedMetricError);
    EXPECT_THROW(auc(std::vector{0.1, 0.4}, std::vector{0, 0}), UndefinedMetricError);
}

TEST(Auc, InvalidInput) {
    EXPECT_THROW(auc(std::vector{0.1}, std::vector{1, 0}), ParameterError);
    EXPECT_THROW(auc(std::vector{0.1, 0.2}, std::vector{1, 2}), ParameterError);
    EXPECT_THROW(auc(std::vector{std::nan(""), 0.2}, std::vector{1, 0}), ParameterError);
}

TEST(Auc, MatchesPairCountingOracle) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const auto in = random_instance(rng, 1 + 60, trial % 5 == 0);
        ASSERT_NEAR(auc(in.s, in.y), oracle::auc_pairs(in.s, in.y), 1e-12);
    }
}

TEST(Auc, InvariantUnderStrictlyIncreasingTransforms) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto in = random_instance(rng, 80, trial % 2 == 0);
        std::vector<double> affine, cubic;
        for (double v : in.s) {
            affine.push_back(3.0 * v - 7.0);
            cubic.push_back(v * v * v);
        }
        const double base = auc(in.s, in.y);
        EXPECT_EQ(auc(affine, in.y), base);
        EXPECT_EQ(auc(cubic, in.y), base);
    }
}

TEST(Auc, LabelFlipComplements) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto in = random_instance(rng, 40, true);
        const double a = auc(in.s, in.y);
        for (auto& y : in.y) y = 1 - y;
        EXPECT_NEAR(auc(in.s, in.y), 1.0 - a, 1e-12);
    }
}

TEST(RocPoints, EndsAtOneOneAndIsMonotone) {
    std::mt19937_64 rng(4);
    const auto in = random_instance(rng, 50, true);
    const auto pts = roc_points(in.s, in.y);
    ASSERT_FALSE(pts.empty());
    EXPECT_EQ(pts.back().fpr, 1.0);
    EXPECT_EQ(pts.back().tpr, 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_LT(pts[i].threshold, pts[i - 1].threshold);
        EXPECT_GE(pts[i].fpr, pts[i - 1].fpr);
        EXPECT_GE(pts[i].tpr, pts[i - 1].tpr);
    }
    // trapezoidal area under the points (from the origin) equals the rank statistic
    double area = 0, fx = 0, ty = 0;
    for (const auto& p : pts) {
        area += (p.fpr - fx) * (p.tpr + ty) / 2.0;
        fx = p.fpr;
        ty = p.tpr;
    }
    EXPECT_NEAR(area, auc(in.s, in.y), 1e-12);
}

TEST(Dice, Examples) {
    BinaryMask full(8, 8, true);
    EXPECT_EQ(*dice(full, full), 1.0);
    BinaryMask left(8, 8), right(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 4; ++x) {
            left.set(x, y);
            right.set(x + 4, y);
        }
    EXPECT_EQ(*dice(left, right), 0.0);
    EXPECT_EQ(*dice(left, full), 2.0 * 32 / 96);
    EXPECT_FALSE(dice(full, BinaryMask(8, 8)).has_value());
    EXPECT_THROW(dice(BinaryMask(2, 2), BinaryMask(3, 2)), ParameterError);
}

TEST(Dice, MatchesPixelOracleAndIouIdentity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.6);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = oracle::random_mask(rng, 32, 32, u(rng));
        const auto g = oracle::random_mask(rng, 32, 32, u(rng));
        const auto d = dice(p, g);
        const double ref = oracle::dice_pixels(p, g);
        if (ref < 0) {
            EXPECT_FALSE(d.has_value());
            continue;
        }
        ASSERT_EQ(*d, ref);
        const double j = *iou(p, g);
        EXPECT_NEAR(*d, 2.0 * j / (1.0 + j), 1e-12);
        EXPECT_EQ(*dice(g, p), *d);
    }
}

TEST(Dice, EmptyGroundTruthExcluded) {
    BinaryMask pred(4, 4);
    pred.set(1, 1);
    EXPECT_FALSE(dice(pred, BinaryMask(4, 4)).has_value());
    EXPECT_FALSE(dice(BinaryMask(4, 4), BinaryMask(4, 4)).has_value());
}

DetectionCounts counts(std::size_t tp, std::size_t fp, std::size_t fn) { return {tp, fp, fn, 0}; }

TEST(DetectionF1, CountFixtures) {
    EXPECT_NEAR(f1(counts(6, 0, 6)), 0.6667, 5e-5);
    EXPECT_NEAR(f1(counts(6, 0, 5)), 0.7059, 5e-5);
    EXPECT_EQ(f1(counts(0, 0, 0)), 1.0);
    EXPECT_EQ(f1(counts(0, 3, 0)), 0.0);
}

TEST(DetectionF1, FromPresenceVectors) {
    std::vector<bool> gt(12, true), pred(12, false);
    for (int i = 0; i < 6; ++i) pred[i] = true;
    const auto c = count_detections(pred, gt);
    EXPECT_EQ(c.tp, 6u);
    EXPECT_EQ(c.fn, 6u);
    EXPECT_NEAR(detection_f1(pred, gt), 2.0 / 3.0, 1e-15);
    EXPECT_THROW(detection_f1({true}, {true, false}), ParameterError);
}

TEST(DetectionF1, PermutationInvariant) {
    std::mt19937_64 rng(6);
    std::bernoulli_distribution bit(0.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<bool, bool>> pairs(30);
        for (auto& [p, g] : pairs) {
            p = bit(rng);
            g = bit(rng);
        }
        auto f = [&] {
            std::vector<bool> p, g;
            for (auto [a, b] : pairs) {
                p.push_back(a);
                g.push_back(b);
            }
            return detection_f1(p, g);
        };
        const double base = f();
        std::ranges::shuffle(pairs, rng);
        EXPECT_EQ(f(), base);
    }
}

TEST(Euclidean, Examples) {
    EXPECT_EQ(euclidean({0, 0}, {3, 4}), 5.0);
    EXPECT_EQ(euclidean({7.5, -2}, {7.5, -2}), 0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-500, 500);
    for (int i = 0; i < 100; ++i) {
        const Point p{u(rng), u(rng)}, q{u(rng), u(rng)};
        const double tx = std::round(u(rng)), ty = std::round(u(rng));
        EXPECT_NEAR(euclidean({p.x + tx, p.y + ty}, {q.x + tx, q.y + ty}), euclidean(p, q), 1e-9);
        EXPECT_EQ(euclidean(p, q), euclidean(q, p));
    }
}

TEST(WeightedScore, DefaultWeights) {
    EXPECT_EQ(weighted_score(1.0, 1.0, {}), 1.0);
    EXPECT_DOUBLE_EQ(weighted_score(0.8, 0.4, {}), 0.7);
}

}  // namespace
}  // namespace ftk::metrics
