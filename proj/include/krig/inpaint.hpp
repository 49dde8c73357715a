#pragma once

// Block-wise Kriging inpainting: tile, fit a variogram per block from its known
// pixels, Krige every damaged pixel, and peel any block that has no known context.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "krig/core.hpp"
#include "krig/kriging.hpp"
#include "krig/variogram.hpp"

namespace krig {

struct InpaintConfig {
    int block_size = 8;
    int margin = 4;
    int max_neighbors = 64;
    double bin_width = 1.0;
    bool deterministic = true;
    unsigned workers = 1;  // 0 = one per hardware thread

    void validate() const {
        if (block_size < 2) {
            throw std::invalid_argument("InpaintConfig: block_size must be >= 2");
        }
        if (margin < 0) {
            throw std::invalid_argument("InpaintConfig: margin must be >= 0");
        }
        if (max_neighbors < 1) {
            throw std::invalid_argument("InpaintConfig: max_neighbors must be >= 1");
        }
        if (!(bin_width > 0.0)) {
            throw std::invalid_argument("InpaintConfig: bin_width must be positive");
        }
    }
};

struct BlockVarianceStat {
    std::size_t block = 0;
    double mean_variance = 0.0;
};

struct InpaintReport {
    std::size_t blocks_total = 0;
    std::size_t blocks_inpainted = 0;
    std::size_t blocks_escalated = 0;
    std::size_t pixels_filled = 0;
    std::size_t degraded_solves = 0;
    std::size_t onion_rings = 0;
    std::vector<BlockVarianceStat> block_variance;
};

struct InpaintResult {
    RasterImage image;
    InpaintReport report;
};

/// Round half-to-even, then clamp into the 8-bit range.
inline std::uint8_t to_intensity(double v) {
    const double r = std::nearbyint(v);
    if (!(r > 0.0)) {
        return 0;
    }
    return r >= 255.0 ? std::uint8_t{255} : static_cast<std::uint8_t>(r);
}

namespace detail {

/// Known (unflagged) positions inside `region`, row-major.
inline std::vector<Position> known_positions(const Rect& region, const DamageMask& mask) {
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(region.rows()) * static_cast<std::size_t>(region.cols()));
    for (int r = region.top; r < region.bottom; ++r) {
        for (int c = region.left; c < region.right; ++c) {
            if (!mask.at(r, c)) {
                out.push_back({r, c});
            }
        }
    }
    return out;
}

/// Indices into `known` of the nearest `max_neighbors` to `target`, ties by row-major order.
inline std::vector<std::size_t> nearest_indices(std::span<const Position> known, Position target,
                                                int max_neighbors) {
    struct Key {
        int d2;
        std::size_t index;  // known is row-major, so index order is the tie-break
    };
    std::vector<Key> keys(known.size());
    for (std::size_t i = 0; i < known.size(); ++i) {
        const int dr = known[i].row - target.row;
        const int dc = known[i].col - target.col;
        keys[i] = {dr * dr + dc * dc, i};
    }
    auto less = [](const Key& a, const Key& b) { return a.d2 != b.d2 ? a.d2 < b.d2 : a.index < b.index; };
    const std::size_t take = std::min(keys.size(), static_cast<std::size_t>(max_neighbors));
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(take), keys.end(), less);
    std::vector<std::size_t> out(take);
    for (std::size_t i = 0; i < take; ++i) {
        out[i] = keys[i].index;
    }
    return out;
}

inline std::vector<PixelSample> gather(std::span<const Position> positions, const RasterImage& image, int channel) {
    std::vector<PixelSample> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        out[i] = {positions[i], static_cast<double>(image.at(positions[i].row, positions[i].col, channel))};
    }
    return out;
}

}  // namespace detail

/// Unflagged pixels of the block's core and margin, nearest to `target` first,
/// truncated to `max_neighbors`. Ties go to the earlier pixel in row-major order.
inline std::vector<PixelSample> select_neighborhood(const BlockRegion& block, const RasterImage& image,
                                                    const DamageMask& mask, Position target, int max_neighbors,
                                                    int channel = 0) {
    require_same_shape(image, mask);
    if (!block.context.contains(target)) {
        throw std::invalid_argument("select_neighborhood: target outside block");
    }
    const auto known = detail::known_positions(block.context, mask);
    const auto idx = detail::nearest_indices(known, target, max_neighbors);
    std::vector<PixelSample> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back({known[i], static_cast<double>(image.at(known[i].row, known[i].col, channel))});
    }
    return out;
}

struct BlockVariogram {
    EmpiricalVariogram empirical;  // no bins when fewer than two known pixels
    VariogramModel model;
    std::size_t known = 0;
};

/// Variogram fitted from known samples of a region of shape rows x cols.
inline BlockVariogram region_variogram(std::span<const PixelSample> samples, const Rect& region, double bin_width) {
    BlockVariogram bv;
    bv.known = samples.size();
    const double max_lag = std::hypot(region.rows() - 1, region.cols() - 1);
    bv.empirical.max_lag = max_lag;
    bv.empirical.bin_width = bin_width;
    if (samples.size() < 2 || !(max_lag > 0.0)) {
        bv.model = {ModelFamily::spherical, 0.0, kFlatSill, std::max(max_lag, 1.0)};
        return bv;
    }
    bv.empirical = empirical_variogram(samples, max_lag, bin_width);
    bv.model = fit_model(bv.empirical);
    return bv;
}

/// The per-block variogram the engine uses for `channel` of `block`.
inline BlockVariogram block_variogram(const BlockRegion& block, const RasterImage& image, const DamageMask& mask,
                                      int channel, double bin_width = 1.0) {
    require_same_shape(image, mask);
    const auto known = detail::known_positions(block.context, mask);
    const auto samples = detail::gather(known, image, channel);
    return region_variogram(samples, block.context, bin_width);
}

struct FilledPixel {
    Position position;
    std::array<double, 3> value{};  // one entry per channel, unclamped
};

struct BlockFill {
    std::vector<FilledPixel> pixels;
    std::size_t degraded = 0;
    double mean_variance = 0.0;
    bool escalated = false;  // no known pixel in the region
};

namespace detail {

/// Krige `targets` from the unflagged pixels of `region`. Every target is solved
/// against the same known set, so predictions never feed one another.
inline BlockFill fill_region(const Rect& region, const RasterImage& image, const DamageMask& mask,
                             std::span<const Position> targets, const InpaintConfig& config) {
    BlockFill fill;
    const auto known = known_positions(region, mask);
    if (known.empty()) {
        fill.escalated = true;
        return fill;
    }
    const int channels = image.channels();
    std::array<std::vector<PixelSample>, 3> samples;
    std::array<VariogramModel, 3> models;
    for (int ch = 0; ch < channels; ++ch) {
        samples[ch] = gather(known, image, ch);
        models[ch] = region_variogram(samples[ch], region, config.bin_width).model;
    }

    fill.pixels.reserve(targets.size());
    double variance_sum = 0.0;
    std::vector<PixelSample> points;
    std::vector<double> values;
    for (Position t : targets) {
        const auto idx = nearest_indices(known, t, config.max_neighbors);
        FilledPixel px;
        px.position = t;
        for (int ch = 0; ch < channels; ++ch) {
            points.clear();
            values.clear();
            for (std::size_t i : idx) {
                points.push_back(samples[ch][i]);
                values.push_back(samples[ch][i].value);
            }
            const auto sys = assemble_system(points, t, models[ch]);
            const auto w = solve_weights(sys);
            const auto p = predict(w, values);
            px.value[ch] = p.value;
            variance_sum += p.variance;
            if (w.degraded) {
                ++fill.degraded;
            }
        }
        fill.pixels.push_back(px);
    }
    if (!targets.empty()) {
        fill.mean_variance = variance_sum / static_cast<double>(targets.size() * static_cast<std::size_t>(channels));
    }
    return fill;
}

inline std::vector<Position> flagged_in(const Rect& region, const DamageMask& mask) {
    std::vector<Position> out;
    for (int r = region.top; r < region.bottom; ++r) {
        for (int c = region.left; c < region.right; ++c) {
            if (mask.at(r, c)) {
                out.push_back({r, c});
            }
        }
    }
    return out;
}

inline void commit(RasterImage& image, DamageMask& mask, const BlockFill& fill) {
    for (const auto& px : fill.pixels) {
        for (int ch = 0; ch < image.channels(); ++ch) {
            image.at(px.position.row, px.position.col, ch) = to_intensity(px.value[ch]);
        }
        mask.set(px.position, false);
    }
}

}  // namespace detail

/// Predictions for every flagged pixel of the block's core, from the block's
/// original known pixels only.
inline BlockFill fill_block(const BlockRegion& block, const RasterImage& image, const DamageMask& mask,
                            const InpaintConfig& config) {
    require_same_shape(image, mask);
    const auto targets = detail::flagged_in(block.core(), mask);
    return detail::fill_region(block.context, image, mask, targets, config);
}

struct OnionReport {
    std::size_t rings = 0;
    std::size_t pixels_filled = 0;
    std::size_t degraded = 0;
};

/// Fill the mask from its boundary inward. Each ring is the set of flagged
/// pixels with at least one known 8-neighbour; a ring is Kriged from the state
/// before it and then marked known. Updates `image` and clears `mask`.
inline OnionReport onion_peel_fallback(RasterImage& image, DamageMask& mask, const InpaintConfig& config) {
    require_same_shape(image, mask);
    config.validate();
    const int w = image.width();
    const int h = image.height();
    const int k = config.block_size;
    const auto [grid_rows, grid_cols] = tile_grid_shape(w, h, k);

    OnionReport report;
    std::size_t remaining = mask.count();
    while (remaining > 0) {
        // Ring pixels grouped by tile, row-major within each tile.
        std::vector<std::vector<Position>> by_block(static_cast<std::size_t>(grid_rows) * grid_cols);
        std::size_t ring_size = 0;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                if (!mask.at(r, c)) {
                    continue;
                }
                bool boundary = false;
                for (int dr = -1; dr <= 1 && !boundary; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const Position q{r + dr, c + dc};
                        if ((dr != 0 || dc != 0) && mask.contains(q) && !mask.at(q)) {
                            boundary = true;
                            break;
                        }
                    }
                }
                if (boundary) {
                    by_block[static_cast<std::size_t>(r / k) * grid_cols + static_cast<std::size_t>(c / k)].push_back(
                        {r, c});
                    ++ring_size;
                }
            }
        }
        if (ring_size == 0) {
            throw FullyMasked("onion_peel_fallback: no known pixel to grow from");
        }

        std::vector<BlockFill> fills;
        for (std::size_t b = 0; b < by_block.size(); ++b) {
            if (by_block[b].empty()) {
                continue;
            }
            const Rect core{static_cast<int>(b / grid_cols) * k, static_cast<int>(b % grid_cols) * k,
                            std::min(h, static_cast<int>(b / grid_cols) * k + k),
                            std::min(w, static_cast<int>(b % grid_cols) * k + k)};
            int margin = config.margin;
            Rect region = expand_clipped(core, margin, w, h);
            while (detail::known_positions(region, mask).empty()) {
                region = expand_clipped(core, ++margin, w, h);
            }
            fills.push_back(detail::fill_region(region, image, mask, by_block[b], config));
        }
        for (const auto& f : fills) {
            detail::commit(image, mask, f);
            report.degraded += f.degraded;
            report.pixels_filled += f.pixels.size();
        }
        remaining -= ring_size;
        ++report.rings;
    }
    return report;
}

/// Restore every flagged pixel. Unflagged pixels are copied bit-exactly.
inline InpaintResult inpaint(const RasterImage& image, const DamageMask& mask, const InpaintConfig& config = {}) {
    config.validate();
    require_same_shape(image, mask);
    const std::size_t damaged = mask.count();
    if (damaged == mask.size()) {
        throw FullyMasked("inpaint: every pixel is masked");
    }

    InpaintResult result{image, {}};
    const auto blocks = tile_blocks(image.width(), image.height(), config.block_size, config.margin);
    result.report.blocks_total = blocks.size();
    if (damaged == 0) {
        return result;
    }

    std::vector<std::size_t> work;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const Rect core = blocks[b].core();
        bool any = false;
        for (int r = core.top; r < core.bottom && !any; ++r) {
            for (int c = core.left; c < core.right; ++c) {
                if (mask.at(r, c)) {
                    any = true;
                    break;
                }
            }
        }
        if (any) {
            work.push_back(b);
        }
    }
    result.report.blocks_inpainted = work.size();

    // Each block reads only the input image and writes its own result slot,
    // so the output does not depend on scheduling.
    std::vector<BlockFill> fills(work.size());
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < work.size(); i = next.fetch_add(1)) {
            fills[i] = fill_block(blocks[work[i]], image, mask, config);
        }
    };
    unsigned workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, work.size()));
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back(run);
        }
    }

    DamageMask remaining = mask;
    for (std::size_t i = 0; i < work.size(); ++i) {
        const auto& f = fills[i];
        if (f.escalated) {
            ++result.report.blocks_escalated;
            continue;
        }
        detail::commit(result.image, remaining, f);
        result.report.degraded_solves += f.degraded;
        result.report.block_variance.push_back({work[i], f.mean_variance});
    }

    if (result.report.blocks_escalated > 0) {
        const auto onion = onion_peel_fallback(result.image, remaining, config);
        result.report.onion_rings = onion.rings;
        result.report.degraded_solves += onion.degraded;
    }
    result.report.pixels_filled = damaged;
    return result;
}

}  // namespace krig
