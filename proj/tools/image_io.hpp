#pragma once

#include <filesystem>
#include <stdexcept>

#include "krig/core.hpp"

namespace krig::io {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads an 8-bit PNG or BMP as grayscale or RGB. Alpha is dropped.
RasterImage read_image(const std::filesystem::path& path);

/// Reads a mask image: any nonzero sample in any channel marks a damaged pixel.
DamageMask read_mask(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterImage& image);
void write_mask_png(const std::filesystem::path& path, const DamageMask& mask);

/// Uncompressed 8-bit (grayscale palette) or 24-bit BMP.
void write_bmp(const std::filesystem::path& path, const RasterImage& image);

}  // namespace krig::io
