#pragma once

// Synthetic damage masks in four categories: thick and thin scratches, light and
// heavy pseudo-text. Masks are pure functions of (category, seed, dimensions).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "krig/core.hpp"

namespace krig {

enum class MaskCategory { thick_scratch, thin_scratch, low_text, heavy_text };

inline constexpr MaskCategory kAllMaskCategories[] = {MaskCategory::thick_scratch, MaskCategory::thin_scratch,
                                                      MaskCategory::low_text, MaskCategory::heavy_text};

inline std::string_view to_string(MaskCategory c) {
    switch (c) {
        case MaskCategory::thick_scratch: return "thick_scratch";
        case MaskCategory::thin_scratch: return "thin_scratch";
        case MaskCategory::low_text: return "low_text";
        case MaskCategory::heavy_text: return "heavy_text";
    }
    return "unknown";
}

inline std::optional<MaskCategory> parse_mask_category(std::string_view s) {
    for (auto c : kAllMaskCategories) {
        if (to_string(c) == s) {
            return c;
        }
    }
    return std::nullopt;
}

inline double default_coverage(MaskCategory c) {
    switch (c) {
        case MaskCategory::thick_scratch: return 0.06;
        case MaskCategory::thin_scratch: return 0.012;
        case MaskCategory::low_text: return 0.035;
        case MaskCategory::heavy_text: return 0.15;
    }
    return 0.05;
}

struct MaskSpec {
    MaskCategory category = MaskCategory::thin_scratch;
    std::uint64_t seed = 0;
    double coverage = 0.0;  // target fraction in (0, 0.5]; 0 picks the category default

    double target_coverage() const { return coverage != 0.0 ? coverage : default_coverage(category); }
};

namespace detail {

/// mt19937_64 is fully specified by the standard; the distributions are not,
/// so the mapping to ranges is done here.
class MaskRng {
public:
    explicit MaskRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class MaskCanvas {
public:
    MaskCanvas(int width, int height) : mask_(width, height), width_(width), height_(height) {}

    /// Flag every pixel whose centre lies within width/2 of segment (x0,y0)-(x1,y1).
    void stroke(double x0, double y0, double x1, double y1, double width) {
        const double half = width / 2.0;
        const int c_lo = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - half - 1)));
        const int c_hi = std::min(width_ - 1, static_cast<int>(std::ceil(std::max(x0, x1) + half + 1)));
        const int r_lo = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - half - 1)));
        const int r_hi = std::min(height_ - 1, static_cast<int>(std::ceil(std::max(y0, y1) + half + 1)));
        const double dx = x1 - x0;
        const double dy = y1 - y0;
        const double len2 = dx * dx + dy * dy;
        for (int r = r_lo; r <= r_hi; ++r) {
            for (int c = c_lo; c <= c_hi; ++c) {
                const double px = c + 0.5;
                const double py = r + 0.5;
                double t = len2 > 0 ? ((px - x0) * dx + (py - y0) * dy) / len2 : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                const double ex = px - (x0 + t * dx);
                const double ey = py - (y0 + t * dy);
                if (ex * ex + ey * ey <= half * half && !mask_.at(r, c)) {
                    mask_.set(r, c);
                    ++flagged_;
                }
            }
        }
    }

    double coverage() const { return static_cast<double>(flagged_) / static_cast<double>(mask_.size()); }
    DamageMask take() { return std::move(mask_); }
    int width() const { return width_; }
    int height() const { return height_; }

private:
    DamageMask mask_;
    int width_;
    int height_;
    std::size_t flagged_ = 0;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxStrokes = 100000;

inline void draw_scratches(MaskCanvas& canvas, MaskRng& rng, double target, int width_lo, int width_hi) {
    const double extent = std::max(canvas.width(), canvas.height());
    for (int n = 0; n < kMaxStrokes && canvas.coverage() < target; ++n) {
        const double stroke_width = rng.integer(width_lo, width_hi);
        double x = rng.uniform(0.0, canvas.width());
        double y = rng.uniform(0.0, canvas.height());
        double heading = rng.uniform(0.0, 2.0 * kPi);
        const int segments = rng.integer(2, 5);
        for (int s = 0; s < segments && canvas.coverage() < target; ++s) {
            const double len = rng.uniform(0.08, 0.25) * extent;
            const double nx = x + len * std::cos(heading);
            const double ny = y + len * std::sin(heading);
            canvas.stroke(x, y, nx, ny, stroke_width);
            x = nx;
            y = ny;
            heading += rng.uniform(-0.6, 0.6);
        }
    }
}

/// Pseudo-glyphs: a few bars and diagonals inside a character cell, laid out in
/// words along text lines.
inline void draw_text(MaskCanvas& canvas, MaskRng& rng, double target, int glyph_lo, int glyph_hi, int stroke_lo,
                      int stroke_hi) {
    const int cap = std::max(4, canvas.height() / 2);
    const int glyph_h = std::min(cap, rng.integer(glyph_lo, glyph_hi));
    const int glyph_w = std::max(3, glyph_h * 2 / 3);
    const int line_pitch = glyph_h + glyph_h / 2;
    const int lines = std::max(1, canvas.height() / line_pitch);
    for (int n = 0; n < kMaxStrokes && canvas.coverage() < target; ++n) {
        const double top = rng.integer(0, lines - 1) * line_pitch + 0.5 * (line_pitch - glyph_h);
        double left = rng.uniform(0.0, std::max(1.0, canvas.width() - 2.0 * glyph_w));
        const int glyphs = rng.integer(2, 7);
        for (int g = 0; g < glyphs && left + glyph_w <= canvas.width() && canvas.coverage() < target; ++g) {
            const double sw = rng.integer(stroke_lo, stroke_hi);
            const int strokes = rng.integer(2, 4);
            for (int s = 0; s < strokes; ++s) {
                const double l = left, r = left + glyph_w, t = top, b = top + glyph_h;
                const double mx = 0.5 * (l + r), my = 0.5 * (t + b);
                switch (rng.integer(0, 5)) {
                    case 0: canvas.stroke(l, t, l, b, sw); break;
                    case 1: canvas.stroke(r, t, r, b, sw); break;
                    case 2: canvas.stroke(l, t, r, t, sw); break;
                    case 3: canvas.stroke(l, my, r, my, sw); break;
                    case 4: canvas.stroke(l, b, r, t, sw); break;
                    default: canvas.stroke(mx, t, mx, b, sw); break;
                }
            }
            left += glyph_w + std::max(2, glyph_w / 3);
        }
    }
}

}  // namespace detail

/// Deterministic synthetic mask of the requested category. Strokes or glyphs
/// are added until the target coverage is reached.
inline DamageMask generate_mask(const MaskSpec& spec, int width, int height) {
    if (width < 16 || height < 16) {
        throw std::invalid_argument("generate_mask: dimensions must be at least 16x16");
    }
    const double target = spec.target_coverage();
    if (!(target > 0.0 && target <= 0.5)) {
        throw std::invalid_argument("generate_mask: coverage must lie in (0, 0.5]");
    }
    detail::MaskRng rng(detail::mix_seed(spec.seed, static_cast<std::uint64_t>(spec.category)));
    detail::MaskCanvas canvas(width, height);
    switch (spec.category) {
        case MaskCategory::thin_scratch: detail::draw_scratches(canvas, rng, target, 1, 2); break;
        case MaskCategory::thick_scratch: detail::draw_scratches(canvas, rng, target, 4, 8); break;
        case MaskCategory::low_text: detail::draw_text(canvas, rng, target, 10, 16, 1, 2); break;
        case MaskCategory::heavy_text: detail::draw_text(canvas, rng, target, 14, 24, 2, 3); break;
    }
    return canvas.take();
}

struct MaskStats {
    double coverage = 0.0;
    std::size_t components = 0;  // 8-connected
};

inline MaskStats mask_stats(const DamageMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::size_t> parent(mask.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    };

    std::size_t flagged = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) {
                continue;
            }
            ++flagged;
            const std::size_t here = static_cast<std::size_t>(r) * w + c;
            // Already-visited neighbours: W, NW, N, NE.
            const int nbrs[4][2] = {{0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
            for (const auto& d : nbrs) {
                const int rr = r + d[0];
                const int cc = c + d[1];
                if (rr >= 0 && cc >= 0 && cc < w && mask.at(rr, cc)) {
                    unite(here, static_cast<std::size_t>(rr) * w + cc);
                }
            }
        }
    }
    MaskStats s;
    s.coverage = static_cast<double>(flagged) / static_cast<double>(mask.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            if (mask.at(r, c) && find(i) == i) {
                ++s.components;
            }
        }
    }
    return s;
}

}  // namespace krig
