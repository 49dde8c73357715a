#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>

#include "krig/core.hpp"

namespace krig {

/// MSE and PSNR of a restoration. psnr is empty when the images are identical.
struct QualityScore {
    double mse = 0.0;
    std::optional<double> psnr;

    bool identical() const { return !psnr.has_value(); }
};

inline double psnr_from_mse(double mse) { return 20.0 * std::log10(255.0 / std::sqrt(mse)); }

namespace detail {

inline void require_same_raster(const RasterImage& f, const RasterImage& g) {
    if (f.width() != g.width() || f.height() != g.height() || f.channels() != g.channels()) {
        throw DimensionMismatch("images differ in shape: " + f.shape_string() + " vs " + g.shape_string());
    }
}

inline QualityScore score(std::uint64_t sq_sum, std::uint64_t count) {
    QualityScore s;
    s.mse = static_cast<double>(sq_sum) / static_cast<double>(count);
    if (sq_sum > 0) {
        s.psnr = psnr_from_mse(s.mse);
    }
    return s;
}

}  // namespace detail

/// Squared differences are summed exactly in 64-bit integers before the mean.
inline QualityScore psnr(const RasterImage& f, const RasterImage& g) {
    detail::require_same_raster(f, g);
    std::uint64_t sum = 0;
    const auto& a = f.samples();
    const auto& b = g.samples();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int d = int{a[i]} - int{b[i]};
        sum += static_cast<std::uint64_t>(d * d);
    }
    return detail::score(sum, a.size());
}

/// Mean squared difference over every sample of every channel.
inline double mse(const RasterImage& f, const RasterImage& g) { return psnr(f, g).mse; }

/// PSNR restricted to flagged positions (all channels).
inline QualityScore masked_psnr(const RasterImage& f, const RasterImage& g, const DamageMask& mask) {
    detail::require_same_raster(f, g);
    require_same_shape(f, mask);
    std::uint64_t sum = 0;
    std::uint64_t count = 0;
    for (int ch = 0; ch < f.channels(); ++ch) {
        for (int r = 0; r < f.height(); ++r) {
            for (int c = 0; c < f.width(); ++c) {
                if (!mask.at(r, c)) {
                    continue;
                }
                const int d = int{f.at(r, c, ch)} - int{g.at(r, c, ch)};
                sum += static_cast<std::uint64_t>(d * d);
                ++count;
            }
        }
    }
    if (count == 0) {
        throw std::invalid_argument("masked_psnr: mask is empty");
    }
    return detail::score(sum, count);
}

}  // namespace krig
