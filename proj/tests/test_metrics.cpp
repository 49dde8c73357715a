#include <gtest/gtest.h>

#include <cmath>

#include "krig/inpaint.hpp"
#include "krig/maskgen.hpp"
#include "krig/metrics.hpp"
#include "support/fixtures.hpp"

namespace krig {
namespace {

using testing::TestRng;

RasterImage two_by_two_with_one_diff() { return RasterImage(2, 2, 1, {10, 20, 30, 40}); }

TEST(Mse, IdenticalImagesScoreZero) {
    const auto a = two_by_two_with_one_diff();
    EXPECT_EQ(mse(a, a), 0.0);
    EXPECT_TRUE(psnr(a, a).identical());
}

TEST(Mse, OneSampleOffByTwo) {
    const auto a = two_by_two_with_one_diff();
    const RasterImage b(2, 2, 1, {10, 22, 30, 40});
    EXPECT_EQ(mse(a, b), 1.0);
    const auto s = psnr(a, b);
    ASSERT_TRUE(s.psnr.has_value());
    EXPECT_NEAR(*s.psnr, 20.0 * std::log10(255.0), 1e-12);
    EXPECT_NEAR(*s.psnr, 48.1308, 1e-4);
}

TEST(Mse, MatchesNaiveDoubleLoop) {
    TestRng rng(41);
    const auto a = testing::random_image(rng, 64, 64, 1);
    const auto b = testing::random_image(rng, 64, 64, 1);
    double naive = 0.0;
    for (int x = 0; x < 64; ++x) {
        for (int y = 0; y < 64; ++y) {
            const double d = static_cast<double>(a.at(y, x)) - static_cast<double>(b.at(y, x));
            naive += d * d;
        }
    }
    naive /= 64.0 * 64.0;
    EXPECT_EQ(mse(a, b), naive);
}

TEST(Psnr, PeakErrorIsZeroDecibels) {
    const RasterImage black(8, 8, 3, 0);
    const RasterImage white(8, 8, 3, 255);
    EXPECT_EQ(mse(black, white), 255.0 * 255.0);
    EXPECT_NEAR(*psnr(black, white).psnr, 0.0, 1e-12);
}

TEST(Psnr, SymmetricAndShapeChecked) {
    TestRng rng(42);
    const auto a = testing::random_image(rng, 13, 7, 3);
    const auto b = testing::random_image(rng, 13, 7, 3);
    EXPECT_EQ(*psnr(a, b).psnr, *psnr(b, a).psnr);
    EXPECT_THROW(psnr(a, RasterImage(13, 7, 1)), DimensionMismatch);
    EXPECT_THROW(mse(a, RasterImage(7, 13, 3)), DimensionMismatch);
}

TEST(Psnr, StrictlyMonotoneInASingleGap) {
    RasterImage a(4, 4, 1, 100);
    RasterImage b = a;
    double prev_mse = 0.0;
    double prev_psnr = INFINITY;
    for (int gap = 1; gap <= 155; ++gap) {
        b.at(2, 1) = static_cast<std::uint8_t>(100 + gap);
        const auto s = psnr(a, b);
        EXPECT_GT(s.mse, prev_mse);
        EXPECT_LT(*s.psnr, prev_psnr);
        prev_mse = s.mse;
        prev_psnr = *s.psnr;
    }
}

TEST(MaskedPsnr, FullMaskEqualsPsnr) {
    TestRng rng(43);
    const auto a = testing::random_image(rng, 9, 9, 1);
    const auto b = testing::random_image(rng, 9, 9, 1);
    EXPECT_EQ(*masked_psnr(a, b, DamageMask(9, 9, true)).psnr, *psnr(a, b).psnr);
}

TEST(MaskedPsnr, SingleMaxErrorPixel) {
    RasterImage a(5, 5, 1, 0);
    RasterImage b = a;
    b.at(1, 1) = 255;
    DamageMask m(5, 5);
    m.set(1, 1);
    EXPECT_NEAR(*masked_psnr(a, b, m).psnr, 0.0, 1e-12);
    EXPECT_THROW(masked_psnr(a, b, DamageMask(5, 5)), std::invalid_argument);
}

TEST(MaskedPsnr, FullAndMaskedMseScaleByCoverage) {
    TestRng rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const int channels = trial % 2 ? 3 : 1;
        const auto original = testing::textured_test_image(40, 32, 100 + trial, channels);
        const auto mask = testing::random_mask(rng, 40, 32, 0.2);
        const auto restored = inpaint(apply_mask(original, mask, 0), mask).image;
        const double full = psnr(original, restored).mse;
        const double masked = masked_psnr(original, restored, mask).mse;
        const double expected = masked * static_cast<double>(mask.count()) / (40.0 * 32.0);
        EXPECT_NEAR(full, expected, 1e-9 * expected);
    }
}

}  // namespace
}  // namespace krig
