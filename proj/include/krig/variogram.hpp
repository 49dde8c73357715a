#pragma once

// Empirical semivariogram estimation and parametric model fitting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "krig/core.hpp"

namespace krig {

struct VariogramBin {
    double lag = 0.0;    // mean separation of the pairs in the bin
    double gamma = 0.0;  // semivariance
    std::size_t pairs = 0;

    friend bool operator==(const VariogramBin&, const VariogramBin&) = default;
};

struct EmpiricalVariogram {
    std::vector<VariogramBin> bins;
    double max_lag = 0.0;
    double bin_width = 1.0;
};

enum class ModelFamily { spherical, exponential, linear };

inline std::string_view to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::spherical: return "spherical";
        case ModelFamily::exponential: return "exponential";
        case ModelFamily::linear: return "linear";
    }
    return "unknown";
}

/// Floor used for the sill of a perfectly flat field.
inline constexpr double kFlatSill = 1e-6;

struct VariogramModel {
    ModelFamily family = ModelFamily::spherical;
    double nugget = 0.0;
    double sill = kFlatSill;
    double range = 1.0;
};

namespace detail {

inline double spherical_shape(double h, double range) {
    if (h >= range) {
        return 1.0;
    }
    const double t = h / range;
    return 1.5 * t - 0.5 * t * t * t;
}

}  // namespace detail

/// Semivariance of `model` at separation h. Zero at h == 0 even when the nugget
/// is positive so Kriging reproduces known values.
inline double model_gamma(const VariogramModel& model, double h) {
    if (!(h >= 0.0)) {
        throw std::invalid_argument("model_gamma: negative separation");
    }
    if (h == 0.0) {
        return 0.0;
    }
    const double partial = model.sill - model.nugget;
    switch (model.family) {
        case ModelFamily::spherical:
            return model.nugget + partial * detail::spherical_shape(h, model.range);
        case ModelFamily::exponential:
            return model.nugget + partial * (1.0 - std::exp(-3.0 * h / model.range));
        case ModelFamily::linear:
            return model.nugget + partial * h / model.range;
    }
    return 0.0;
}

/// Bin index for a separation: bin i covers [(i - 1/2) w, (i + 1/2) w).
inline std::size_t lag_bin_index(double distance, double bin_width) {
    return static_cast<std::size_t>(std::floor(distance / bin_width + 0.5));
}

/// Matheron estimator over all unordered sample pairs separated by at most `max_lag`.
/// Empty bins are dropped.
inline EmpiricalVariogram empirical_variogram(std::span<const PixelSample> samples, double max_lag,
                                              double bin_width = 1.0) {
    if (samples.size() < 2) {
        throw std::invalid_argument("empirical_variogram: need at least 2 samples");
    }
    if (!(max_lag > 0.0) || !(bin_width > 0.0)) {
        throw std::invalid_argument("empirical_variogram: max_lag and bin_width must be positive");
    }
    const std::size_t nbins = lag_bin_index(max_lag, bin_width) + 1;
    std::vector<double> sq_sum(nbins, 0.0);
    std::vector<double> dist_sum(nbins, 0.0);
    std::vector<std::size_t> counts(nbins, 0);

    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double d = std::sqrt(squared_distance(samples[i].position, samples[j].position));
            if (d > max_lag) {
                continue;
            }
            const std::size_t b = lag_bin_index(d, bin_width);
            const double diff = samples[i].value - samples[j].value;
            sq_sum[b] += diff * diff;
            dist_sum[b] += d;
            ++counts[b];
        }
    }

    EmpiricalVariogram ev;
    ev.max_lag = max_lag;
    ev.bin_width = bin_width;
    for (std::size_t b = 0; b < nbins; ++b) {
        if (counts[b] == 0) {
            continue;
        }
        const double n = static_cast<double>(counts[b]);
        ev.bins.push_back({dist_sum[b] / n, sq_sum[b] / (2.0 * n), counts[b]});
    }
    if (ev.bins.empty()) {
        throw std::invalid_argument("empirical_variogram: no sample pair within max_lag");
    }
    return ev;
}

namespace detail {

struct SphericalFit {
    double nugget = 0.0;
    double partial = 0.0;
    double cost = std::numeric_limits<double>::infinity();
};

/// For a fixed range the spherical model is linear in (nugget, partial sill):
/// solve the pair-count-weighted least squares with both coefficients >= 0.
inline SphericalFit fit_spherical_at_range(std::span<const VariogramBin> bins, double range) {
    double sw = 0, sf = 0, sff = 0, sg = 0, sfg = 0;
    for (const auto& b : bins) {
        const double w = static_cast<double>(b.pairs);
        const double f = spherical_shape(b.lag, range);
        sw += w;
        sf += w * f;
        sff += w * f * f;
        sg += w * b.gamma;
        sfg += w * f * b.gamma;
    }
    auto cost_of = [&](double c0, double c) {
        double s = 0;
        for (const auto& b : bins) {
            const double r = b.gamma - c0 - c * spherical_shape(b.lag, range);
            s += static_cast<double>(b.pairs) * r * r;
        }
        return s;
    };

    std::array<SphericalFit, 3> candidates{};
    const double det = sw * sff - sf * sf;
    if (det > 1e-12 * sw * sff) {
        const double c0 = (sff * sg - sf * sfg) / det;
        const double c = (sw * sfg - sf * sg) / det;
        if (c0 >= 0.0 && c >= 0.0) {
            candidates[0] = {c0, c, cost_of(c0, c)};
        }
    }
    if (sff > 0.0) {
        const double c = std::max(0.0, sfg / sff);
        candidates[1] = {0.0, c, cost_of(0.0, c)};
    }
    {
        const double c0 = std::max(0.0, sg / sw);
        candidates[2] = {c0, 0.0, cost_of(c0, 0.0)};
    }
    return *std::min_element(candidates.begin(), candidates.end(),
                             [](const SphericalFit& a, const SphericalFit& b) { return a.cost < b.cost; });
}

}  // namespace detail

/// Least-squares spherical fit with fallbacks: a flat model when every bin is zero,
/// a linear model through the origin when fewer than three bins exist.
inline VariogramModel fit_model(const EmpiricalVariogram& empirical) {
    const auto& bins = empirical.bins;
    if (bins.empty()) {
        throw std::invalid_argument("fit_model: empirical variogram has no bins");
    }
    double max_bin_lag = 0.0;
    for (const auto& b : bins) {
        max_bin_lag = std::max(max_bin_lag, b.lag);
    }
    const double max_lag = empirical.max_lag > 0.0 ? empirical.max_lag : std::max(max_bin_lag, 1.0);

    const bool all_zero = std::all_of(bins.begin(), bins.end(), [](const VariogramBin& b) { return b.gamma <= 0.0; });
    if (all_zero) {
        return {ModelFamily::spherical, 0.0, kFlatSill, max_lag};
    }

    if (bins.size() < 3) {
        double num = 0, den = 0;
        for (const auto& b : bins) {
            const double w = static_cast<double>(b.pairs);
            num += w * b.gamma * b.lag;
            den += w * b.lag * b.lag;
        }
        const double slope = den > 0.0 ? num / den : 0.0;
        return {ModelFamily::linear, 0.0, std::max(slope * max_lag, kFlatSill), max_lag};
    }

    // Coarse log-spaced scan over the range, then golden-section refinement
    // in the bracket around the best grid point.
    double min_bin_lag = bins.front().lag;
    for (const auto& b : bins) {
        if (b.lag > 0.0) {
            min_bin_lag = std::min(min_bin_lag, b.lag);
        }
    }
    const double lo = std::max(min_bin_lag * 0.5, 1e-6);
    const double hi = std::max(max_bin_lag, max_lag) * 2.0;
    constexpr int kGrid = 240;
    std::vector<double> grid(kGrid);
    const double ratio = std::log(hi / lo) / (kGrid - 1);
    for (int i = 0; i < kGrid; ++i) {
        grid[i] = lo * std::exp(ratio * i);
    }
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        const double cost = detail::fit_spherical_at_range(bins, grid[i]).cost;
        if (cost < best_cost) {
            best_cost = cost;
            best = i;
        }
    }
    double a = grid[std::max(best - 1, 0)];
    double b = grid[std::min(best + 1, kGrid - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = detail::fit_spherical_at_range(bins, x1).cost;
    double f2 = detail::fit_spherical_at_range(bins, x2).cost;
    for (int it = 0; it < 120 && (b - a) > 1e-12 * b; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = detail::fit_spherical_at_range(bins, x1).cost;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = detail::fit_spherical_at_range(bins, x2).cost;
        }
    }
    double range = 0.5 * (a + b);
    auto fit = detail::fit_spherical_at_range(bins, range);
    if (fit.cost > best_cost) {
        range = grid[best];
        fit = detail::fit_spherical_at_range(bins, range);
    }

    VariogramModel model{ModelFamily::spherical, fit.nugget, fit.nugget + fit.partial, range};
    if (model.sill < kFlatSill) {
        model.sill = kFlatSill;
        model.nugget = std::min(model.nugget, model.sill);
    }
    return model;
}

}  // namespace krig
