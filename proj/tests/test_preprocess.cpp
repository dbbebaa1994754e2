#include <gtest/gtest.h>

#include <random>

#include "fundus_tk/preprocess.hpp"
#include "oracles.hpp"

namespace ftk::preprocess {
namespace {

Raster random_raster(std::mt19937_64& rng, int w, int h, int c) {
    std::uniform_int_distribution<int> u(0, 255);
    Raster r(w, h, c);
    for (auto& v : r.data()) v = static_cast<std::uint8_t>(u(rng));
    return r;
}

TEST(GaussianKernel, NormalizedAndTruncated) {
    const auto k = gaussian_kernel(2.2);
    EXPECT_EQ(k.size(), 2u * 7u + 1u);  // radius ceil(6.6) = 7
    double sum = 0;
    for (double v : k) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_THROW(gaussian_kernel(0.0), ParameterError);
}

TEST(IlluminationCorrect, ConstantImageMapsToOffset) {
    for (std::uint8_t level : {0, 17, 200, 255}) {
        const Raster img(64, 64, 3, level);
        const auto out = illumination_correct(img, 5.0, 4.0, 128);
        for (auto v : out.data()) ASSERT_EQ(v, 128);
    }
}

TEST(IlluminationCorrect, ZeroGainGivesOffset) {
    std::mt19937_64 rng(1);
    const auto out = illumination_correct(random_raster(rng, 20, 15, 3), 3.0, 0.0, 200);
    for (auto v : out.data()) ASSERT_EQ(v, 200);
}

TEST(IlluminationCorrect, DarkPixelOnBrightField) {
    Raster img(11, 11, 1, 255);
    img.at(5, 5) = 0;
    const auto out = illumination_correct(img, 50.0, 4.0, 128);
    EXPECT_LT(out.at(5, 5), 128);
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x)
            if (x != 5 || y != 5) {
                EXPECT_NEAR(out.at(x, y), 128, 10);
            }
}

TEST(IlluminationCorrect, MatchesDenseConvolutionOracle) {
    std::mt19937_64 rng(2);
    for (double sigma : {0.8, 2.0, 50.0}) {
        const auto img = random_raster(rng, 11, 11, 1);
        std::vector<double> plane(121);
        for (int i = 0; i < 121; ++i) plane[i] = img.data()[i];
        const auto bg = oracle::dense_gaussian(plane, 11, 11, sigma);
        const auto out = illumination_correct(img, sigma, 4.0, 128);
        for (int i = 0; i < 121; ++i) {
            const double expected = std::clamp(4.0 * (plane[i] - bg[i]) + 128.0, 0.0, 255.0);
            EXPECT_LE(std::abs(out.data()[i] - expected), 1.0) << "sigma " << sigma << " pixel " << i;
        }
    }
}

TEST(IlluminationCorrect, TranslationEquivariantInInterior) {
    std::mt19937_64 rng(3);
    const int n = 64, k = 3, margin = 8;
    const double sigma = 2.0;  // radius 6 < margin
    const auto a = random_raster(rng, n, n, 1);
    Raster b(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) b.at(x, y) = a.at(std::max(0, x - k), std::max(0, y - k));
    const auto oa = illumination_correct(a, sigma, 4.0, 128);
    const auto ob = illumination_correct(b, sigma, 4.0, 128);
    for (int y = margin + k; y < n - margin; ++y)
        for (int x = margin + k; x < n - margin; ++x) ASSERT_EQ(ob.at(x, y), oa.at(x - k, y - k));
}

TEST(IlluminationCorrect, Errors) {
    EXPECT_THROW(illumination_correct(Raster(4, 4, 1), 0.0, 4.0, 128), ParameterError);
    EXPECT_THROW(illumination_correct(Raster(4, 4, 1), -1.0, 4.0, 128), ParameterError);
}

TEST(IlluminationCorrect, DefaultSigmaIsWidthOver30) {
    EXPECT_DOUBLE_EQ(default_sigma(2124), 70.8);
    std::mt19937_64 rng(4);
    const auto img = random_raster(rng, 90, 40, 3);
    EXPECT_EQ(illumination_correct(img), illumination_correct(img, 3.0, 4.0, 128));
}

TEST(Resize, IdentityIsBitExact) {
    std::mt19937_64 rng(5);
    const auto img = random_raster(rng, 13, 7, 3);
    EXPECT_EQ(resize(img, 13, 7, Interp::bilinear), img);
    EXPECT_EQ(resize(img, 13, 7, Interp::nearest), img);
}

TEST(Resize, NearestDuplicatesCheckerboard) {
    Raster img(2, 2, 1, std::vector<std::uint8_t>{0, 255, 255, 0});
    const auto out = resize(img, 4, 4, Interp::nearest);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) EXPECT_EQ(out.at(x, y), img.at(x / 2, y / 2));
}

TEST(Resize, ConstantPreserved) {
    EXPECT_EQ(resize(Raster(4, 4, 1, 77), 3, 3, Interp::bilinear), Raster(3, 3, 1, 77));
    EXPECT_EQ(resize(Raster(4, 4, 3, 9), 11, 5, Interp::nearest), Raster(11, 5, 3, 9));
    const double v = 0.1234567891234;
    EXPECT_EQ(resize(ProbMap(302, 302, v), 2124, 2156), ProbMap(2124, 2156, v));
    EXPECT_EQ(resize(ProbMap(7, 9, v), 3, 2, Interp::nearest), ProbMap(3, 2, v));
}

TEST(Resize, BilinearInterpolatesLinearRamp) {
    // Interior samples of a linear ramp stay on the ramp.
    std::vector<double> v(8);
    for (int x = 0; x < 8; ++x) v[x] = x / 7.0;
    const auto out = resize(ProbMap(8, 1, v), 4, 1);
    // dst 1 -> src 2.5, dst 2 -> src 4.5
    EXPECT_NEAR(out.at(1, 0), 2.5 / 7.0, 1e-15);
    EXPECT_NEAR(out.at(2, 0), 4.5 / 7.0, 1e-15);
}

TEST(Resize, MaskUsesNearest) {
    BinaryMask m(2, 1);
    m.set(1, 0);
    const auto out = resize(m, 4, 1);
    EXPECT_FALSE(out.get(0, 0));
    EXPECT_FALSE(out.get(1, 0));
    EXPECT_TRUE(out.get(2, 0));
    EXPECT_TRUE(out.get(3, 0));
}

TEST(Resize, ZeroTargetRejected) {
    EXPECT_THROW(resize(Raster(4, 4, 1), 0, 4, Interp::nearest), ParameterError);
    EXPECT_THROW(resize(ProbMap(4, 4), 4, 0), ParameterError);
}

TEST(ToGray, Luma) {
    Raster img(1, 1, 3, std::vector<std::uint8_t>{255, 0, 0});
    EXPECT_EQ(to_gray(img).at(0, 0), 76);  // round(0.299 * 255)
}

}  // namespace
}  // namespace ftk::preprocess
