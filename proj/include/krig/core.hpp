#pragma once

// Image, mask and block-region data model shared by every other module.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace krig {

/// Raised when two rasters that must share a shape do not.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an image has no known pixel left to predict from.
class FullyMasked : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Position {
    int row = 0;
    int col = 0;

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position&, const Position&) = default;
};

struct PixelSample {
    Position position;
    double value = 0.0;
};

inline double squared_distance(Position a, Position b) {
    const double dr = a.row - b.row;
    const double dc = a.col - b.col;
    return dr * dr + dc * dc;
}

/// 8-bit raster with 1 or 3 channels, stored as consecutive row-major planes.
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        check_shape(width, height, channels);
        samples_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
    }

    RasterImage(int width, int height, int channels, std::vector<std::uint8_t> samples)
        : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
        check_shape(width, height, channels);
        if (samples_.size() != plane_size() * static_cast<std::size_t>(channels)) {
            throw std::invalid_argument("RasterImage: sample count does not match width*height*channels");
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }
    bool empty() const { return samples_.empty(); }

    std::uint8_t at(int row, int col, int channel = 0) const { return samples_[index(row, col, channel)]; }
    std::uint8_t& at(int row, int col, int channel = 0) { return samples_[index(row, col, channel)]; }

    std::span<const std::uint8_t> plane(int channel) const {
        return {samples_.data() + plane_size() * static_cast<std::size_t>(channel), plane_size()};
    }
    std::span<std::uint8_t> plane(int channel) {
        return {samples_.data() + plane_size() * static_cast<std::size_t>(channel), plane_size()};
    }

    const std::vector<std::uint8_t>& samples() const { return samples_; }

    bool contains(Position p) const { return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_; }

    std::string shape_string() const {
        std::ostringstream os;
        os << width_ << "x" << height_ << "x" << channels_;
        return os.str();
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    static void check_shape(int width, int height, int channels) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("RasterImage: width and height must be >= 1");
        }
        if (channels != 1 && channels != 3) {
            throw std::invalid_argument("RasterImage: channels must be 1 or 3");
        }
    }

    std::size_t index(int row, int col, int channel) const {
        return plane_size() * static_cast<std::size_t>(channel) +
               static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> samples_;
};

/// Binary raster, true = damaged. Applies to every channel of its image.
class DamageMask {
public:
    DamageMask() = default;

    DamageMask(int width, int height, bool fill = false) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("DamageMask: width and height must be >= 1");
        }
        flags_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return flags_.size(); }

    bool at(int row, int col) const { return flags_[index(row, col)] != 0; }
    bool at(Position p) const { return at(p.row, p.col); }
    void set(int row, int col, bool damaged = true) { flags_[index(row, col)] = damaged ? 1 : 0; }
    void set(Position p, bool damaged = true) { set(p.row, p.col, damaged); }

    bool contains(Position p) const { return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_; }

    std::size_t count() const { return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1)); }

    std::string shape_string() const {
        std::ostringstream os;
        os << width_ << "x" << height_;
        return os.str();
    }

    friend bool operator==(const DamageMask&, const DamageMask&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> flags_;
};

/// Half-open rectangle [top, bottom) x [left, right).
struct Rect {
    int top = 0;
    int left = 0;
    int bottom = 0;
    int right = 0;

    int rows() const { return bottom - top; }
    int cols() const { return right - left; }
    bool contains(Position p) const { return p.row >= top && p.row < bottom && p.col >= left && p.col < right; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// One tile: a core region owned by the tile plus a context border clipped to the image.
struct BlockRegion {
    Position origin;
    int core_rows = 0;
    int core_cols = 0;
    int margin = 0;
    Rect context;  // core grown by margin, clipped

    Rect core() const { return {origin.row, origin.col, origin.row + core_rows, origin.col + core_cols}; }
};

/// Grow `core` by `margin` pixels on every side, clipped to a width x height image.
inline Rect expand_clipped(const Rect& core, int margin, int width, int height) {
    return {std::max(0, core.top - margin), std::max(0, core.left - margin), std::min(height, core.bottom + margin),
            std::min(width, core.right + margin)};
}

/// Partition a width x height image into k x k tiles in row-major order of origins.
/// Edge tiles are truncated rather than padded.
inline std::vector<BlockRegion> tile_blocks(int width, int height, int k, int margin) {
    if (k < 2) {
        throw std::invalid_argument("tile_blocks: block size must be >= 2");
    }
    if (margin < 0) {
        throw std::invalid_argument("tile_blocks: margin must be >= 0");
    }
    if (width < 1 || height < 1) {
        throw std::invalid_argument("tile_blocks: image must be at least 1x1");
    }
    std::vector<BlockRegion> blocks;
    for (int r = 0; r < height; r += k) {
        for (int c = 0; c < width; c += k) {
            BlockRegion b;
            b.origin = {r, c};
            b.core_rows = std::min(k, height - r);
            b.core_cols = std::min(k, width - c);
            b.margin = margin;
            b.context = expand_clipped(b.core(), margin, width, height);
            blocks.push_back(b);
        }
    }
    return blocks;
}

/// Number of tile rows and columns produced by tile_blocks.
inline std::pair<int, int> tile_grid_shape(int width, int height, int k) {
    return {(height + k - 1) / k, (width + k - 1) / k};
}

inline void require_same_shape(const RasterImage& image, const DamageMask& mask) {
    if (image.width() != mask.width() || image.height() != mask.height()) {
        throw DimensionMismatch("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                                " but mask is " + mask.shape_string());
    }
}

/// Render a damaged image: flagged positions get `sentinel` in every channel.
inline RasterImage apply_mask(const RasterImage& image, const DamageMask& mask, std::uint8_t sentinel = 0) {
    require_same_shape(image, mask);
    RasterImage out = image;
    for (int ch = 0; ch < image.channels(); ++ch) {
        for (int r = 0; r < image.height(); ++r) {
            for (int c = 0; c < image.width(); ++c) {
                if (mask.at(r, c)) {
                    out.at(r, c, ch) = sentinel;
                }
            }
        }
    }
    return out;
}

struct PairReport {
    std::size_t damaged = 0;
    double fraction = 0.0;
};

inline PairReport validate_pair(const RasterImage& image, const DamageMask& mask) {
    require_same_shape(image, mask);
    PairReport report;
    report.damaged = mask.count();
    report.fraction = static_cast<double>(report.damaged) / static_cast<double>(mask.size());
    return report;
}

}  // namespace krig
