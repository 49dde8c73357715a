#pragma once

// Shared test data: the 8x9 worked-example block, synthetic test images, and
// small deterministic random helpers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "krig/core.hpp"

namespace krig::testing {

inline constexpr int kBlockRows = 8;
inline constexpr int kBlockCols = 9;

// Original block.
inline constexpr std::array<std::array<int, kBlockCols>, kBlockRows> kOriginalBlock{{
    {123, 124, 125, 115, 119, 113, 121, 125, 124},
    {123, 122, 125, 120, 121, 122, 125, 123, 124},
    {121, 122, 124, 126, 122, 120, 127, 124, 121},
    {121, 122, 120, 124, 121, 123, 125, 126, 128},
    {121, 123, 122, 123, 121, 125, 133, 122, 123},
    {122, 118, 126, 127, 123, 124, 121, 125, 125},
    {123, 120, 121, 129, 119, 125, 123, 126, 129},
    {125, 123, 118, 121, 122, 122, 123, 133, 128},
}};

// Same block with the scratch zeroed.
inline constexpr std::array<std::array<int, kBlockCols>, kBlockRows> kScratchedBlock{{
    {123, 124, 125, 115, 119, 113, 121, 125, 124},
    {0, 122, 125, 120, 121, 122, 125, 0, 0},
    {0, 122, 124, 126, 0, 0, 0, 124, 121},
    {121, 0, 0, 0, 121, 123, 125, 126, 128},
    {0, 0, 122, 123, 121, 125, 133, 122, 123},
    {122, 118, 0, 127, 123, 124, 121, 125, 125},
    {123, 120, 0, 129, 119, 125, 123, 126, 129},
    {125, 123, 118, 0, 122, 122, 123, 133, 128},
}};

// Reported restoration of the scratched block.
inline constexpr std::array<std::array<int, kBlockCols>, kBlockRows> kReportedRestoration{{
    {123, 124, 125, 115, 119, 113, 121, 125, 124},
    {121, 122, 125, 120, 121, 122, 125, 124, 122},
    {119, 122, 124, 126, 122, 123, 125, 124, 121},
    {121, 122, 123, 123, 121, 123, 125, 126, 128},
    {120, 120, 122, 123, 121, 125, 133, 122, 123},
    {122, 118, 122, 127, 123, 124, 121, 125, 125},
    {123, 120, 122, 129, 119, 125, 123, 126, 129},
    {125, 123, 118, 122, 122, 122, 123, 133, 128},
}};

template <typename Grid>
RasterImage grid_image(const Grid& g) {
    RasterImage img(kBlockCols, kBlockRows, 1);
    for (int r = 0; r < kBlockRows; ++r) {
        for (int c = 0; c < kBlockCols; ++c) {
            img.at(r, c) = static_cast<std::uint8_t>(g[r][c]);
        }
    }
    return img;
}

inline RasterImage original_block() { return grid_image(kOriginalBlock); }

/// Damage pattern: every zero in the scratched block (the original has no zeros).
inline DamageMask scratch_mask() {
    DamageMask m(kBlockCols, kBlockRows);
    for (int r = 0; r < kBlockRows; ++r) {
        for (int c = 0; c < kBlockCols; ++c) {
            if (kScratchedBlock[r][c] == 0) {
                m.set(r, c);
            }
        }
    }
    return m;
}

/// Deterministic uniform/normal draws independent of the standard library's distributions.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

namespace detail {

/// Octaves of bilinear value noise, coarsest cell first; amplitude decays by `decay`.
inline std::vector<double> value_noise(TestRng& rng, int width, int height, int coarsest, int finest,
                                       double amplitude, double decay) {
    std::vector<double> acc(static_cast<std::size_t>(width) * height, 0.0);
    for (int cell = coarsest; cell >= finest; cell /= 2) {
        const int gw = width / cell + 2;
        const int gh = height / cell + 2;
        std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
        for (auto& v : lattice) {
            v = rng.uniform(-1.0, 1.0);
        }
        auto at = [&](int xx, int yy) { return lattice[static_cast<std::size_t>(yy) * gw + xx]; };
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const double fx = static_cast<double>(c) / cell;
                const double fy = static_cast<double>(r) / cell;
                const int ix = static_cast<int>(fx);
                const int iy = static_cast<int>(fy);
                const double tx = fx - ix;
                const double ty = fy - iy;
                const double top = at(ix, iy) * (1 - tx) + at(ix + 1, iy) * tx;
                const double bot = at(ix, iy + 1) * (1 - tx) + at(ix + 1, iy + 1) * tx;
                acc[static_cast<std::size_t>(r) * width + c] += amplitude * (top * (1 - ty) + bot * ty);
            }
        }
        amplitude *= decay;
    }
    return acc;
}

}  // namespace detail

/// Portrait-like content: shaded background, a few soft-edged shapes, light
/// surface detail and mild sensor noise.
inline RasterImage smooth_test_image(int width, int height, std::uint64_t seed = 7, int channels = 1) {
    TestRng rng(seed);
    struct Blob {
        double cx, cy, rx, ry, level;
    };
    std::vector<Blob> blobs;
    for (int i = 0; i < 6; ++i) {
        blobs.push_back({rng.uniform(0.1, 0.9) * width, rng.uniform(0.1, 0.9) * height,
                         rng.uniform(0.08, 0.25) * width, rng.uniform(0.08, 0.25) * height, rng.uniform(-60, 60)});
    }
    RasterImage img(width, height, channels);
    for (int ch = 0; ch < channels; ++ch) {
        const double tint = 1.0 - 0.15 * ch;
        const auto detail = detail::value_noise(rng, width, height, 16, 2, 9.0, 0.8);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const double x = static_cast<double>(c) / width;
                const double y = static_cast<double>(r) / height;
                double v = 90 + 70 * x + 30 * y + 18 * std::sin(3.1 * x + 1.7 * y) * std::cos(2.3 * y);
                for (const auto& b : blobs) {
                    const double dx = (c - b.cx) / b.rx;
                    const double dy = (r - b.cy) / b.ry;
                    const double d = (std::sqrt(dx * dx + dy * dy) - 1.0) * std::min(b.rx, b.ry);
                    v += b.level / (1.0 + std::exp(d / 1.5));  // ~3 px soft edge
                }
                v += detail[static_cast<std::size_t>(r) * width + c];
                v = v * tint + 2.5 * rng.normal();
                img.at(r, c, ch) = clamp_u8(v);
            }
        }
    }
    return img;
}

/// Fur-like texture: many octaves of value noise plus strong pixel noise.
inline RasterImage textured_test_image(int width, int height, std::uint64_t seed = 11, int channels = 1) {
    TestRng rng(seed);
    RasterImage img(width, height, channels);
    for (int ch = 0; ch < channels; ++ch) {
        const auto acc = detail::value_noise(rng, width, height, 64, 2, 60.0, 0.8);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                img.at(r, c, ch) = clamp_u8(128 + acc[static_cast<std::size_t>(r) * width + c] + 18 * rng.normal());
            }
        }
    }
    return img;
}

inline RasterImage random_image(TestRng& rng, int width, int height, int channels) {
    RasterImage img(width, height, channels);
    for (int ch = 0; ch < channels; ++ch) {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                img.at(r, c, ch) = static_cast<std::uint8_t>(rng.integer(0, 255));
            }
        }
    }
    return img;
}

/// Random mask with roughly `fraction` of pixels flagged, never all of them.
inline DamageMask random_mask(TestRng& rng, int width, int height, double fraction) {
    DamageMask m(width, height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (rng.uniform() < fraction) {
                m.set(r, c);
            }
        }
    }
    if (m.count() == m.size()) {
        m.set(0, 0, false);
    }
    return m;
}

}  // namespace krig::testing
