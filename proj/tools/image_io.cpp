#include "image_io.hpp"

#include <png.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace krig::io {
namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageIoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RasterImage from_interleaved(int width, int height, int channels, const std::vector<std::uint8_t>& pixels) {
    RasterImage img(width, height, channels);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                img.at(r, c, ch) = pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
            }
        }
    }
    return img;
}

RasterImage read_png(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw ImageIoError("bad PNG " + path.string() + ": " + image.message);
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw ImageIoError("bad PNG " + path.string() + ": " + image.message);
    }
    return from_interleaved(static_cast<int>(image.width), static_cast<int>(image.height), color ? 3 : 1, pixels);
}

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}
std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

RasterImage read_bmp(const std::vector<std::uint8_t>& b, const std::filesystem::path& path) {
    auto fail = [&](const char* why) { return ImageIoError("bad BMP " + path.string() + ": " + why); };
    if (b.size() < 54) {
        throw fail("truncated header");
    }
    const std::uint32_t data_offset = le32(b, 10);
    const std::uint32_t header_size = le32(b, 14);
    const auto width = static_cast<std::int32_t>(le32(b, 18));
    const auto raw_height = static_cast<std::int32_t>(le32(b, 22));
    const std::uint16_t bpp = le16(b, 28);
    const std::uint32_t compression = le32(b, 30);
    std::uint32_t palette_size = le32(b, 46);
    if (width <= 0 || raw_height == 0) {
        throw fail("bad dimensions");
    }
    if (compression != 0 && !(compression == 3 && bpp == 32)) {
        throw fail("compressed BMP not supported");
    }
    if (bpp != 8 && bpp != 24 && bpp != 32) {
        throw fail("only 8, 24 and 32 bit BMP supported");
    }
    const bool bottom_up = raw_height > 0;
    const int height = bottom_up ? raw_height : -raw_height;
    const std::size_t stride = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
    if (data_offset + stride * static_cast<std::size_t>(height) > b.size()) {
        throw fail("truncated pixel data");
    }

    std::vector<std::array<std::uint8_t, 3>> palette;  // RGB
    bool gray_palette = true;
    if (bpp == 8) {
        if (palette_size == 0) {
            palette_size = 256;
        }
        const std::size_t at = 14 + header_size;
        if (at + 4 * static_cast<std::size_t>(palette_size) > b.size()) {
            throw fail("truncated palette");
        }
        for (std::uint32_t i = 0; i < palette_size; ++i) {
            const std::size_t p = at + 4 * i;
            palette.push_back({b[p + 2], b[p + 1], b[p]});
            gray_palette = gray_palette && b[p] == b[p + 1] && b[p + 1] == b[p + 2];
        }
    }

    const int channels = (bpp == 8 && gray_palette) ? 1 : 3;
    RasterImage img(width, height, channels);
    for (int r = 0; r < height; ++r) {
        const std::size_t row_at = data_offset + stride * static_cast<std::size_t>(bottom_up ? height - 1 - r : r);
        for (int c = 0; c < width; ++c) {
            if (bpp == 8) {
                const std::uint8_t idx = b[row_at + c];
                if (idx >= palette.size()) {
                    throw fail("palette index out of range");
                }
                for (int ch = 0; ch < channels; ++ch) {
                    img.at(r, c, ch) = palette[idx][ch];
                }
            } else {
                const std::size_t p = row_at + static_cast<std::size_t>(c) * (bpp / 8);
                img.at(r, c, 0) = b[p + 2];
                img.at(r, c, 1) = b[p + 1];
                img.at(r, c, 2) = b[p];
            }
        }
    }
    return img;
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}
void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

RasterImage read_image(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
        return read_png(bytes, path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') {
        return read_bmp(bytes, path);
    }
    throw ImageIoError("unrecognised image format: " + path.string());
}

DamageMask read_mask(const std::filesystem::path& path) {
    const auto img = read_image(path);
    DamageMask mask(img.width(), img.height());
    for (int ch = 0; ch < img.channels(); ++ch) {
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c) {
                if (img.at(r, c, ch) != 0) {
                    mask.set(r, c);
                }
            }
        }
    }
    return mask;
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    const int ch_count = img.channels();
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            for (int ch = 0; ch < ch_count; ++ch) {
                pixels[(static_cast<std::size_t>(r) * img.width() + c) * ch_count + ch] = img.at(r, c, ch);
            }
        }
    }
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
        throw ImageIoError("cannot write " + path.string() + ": " + image.message);
    }
}

void write_mask_png(const std::filesystem::path& path, const DamageMask& mask) {
    RasterImage img(mask.width(), mask.height(), 1);
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            img.at(r, c) = mask.at(r, c) ? 255 : 0;
        }
    }
    write_png(path, img);
}

void write_bmp(const std::filesystem::path& path, const RasterImage& img) {
    const bool gray = img.channels() == 1;
    const std::uint16_t bpp = gray ? 8 : 24;
    const std::size_t stride = ((static_cast<std::size_t>(img.width()) * bpp + 31) / 32) * 4;
    const std::uint32_t palette_bytes = gray ? 256 * 4 : 0;
    const std::uint32_t offset = 54 + palette_bytes;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(stride * img.height());

    std::vector<std::uint8_t> out;
    out.reserve(offset + data_bytes);
    out.push_back('B');
    out.push_back('M');
    put32(out, offset + data_bytes);
    put32(out, 0);
    put32(out, offset);
    put32(out, 40);
    put32(out, static_cast<std::uint32_t>(img.width()));
    put32(out, static_cast<std::uint32_t>(img.height()));
    put16(out, 1);
    put16(out, bpp);
    put32(out, 0);
    put32(out, data_bytes);
    put32(out, 2835);
    put32(out, 2835);
    put32(out, gray ? 256 : 0);
    put32(out, 0);
    if (gray) {
        for (int i = 0; i < 256; ++i) {
            const auto v = static_cast<std::uint8_t>(i);
            out.insert(out.end(), {v, v, v, 0});
        }
    }
    for (int r = img.height() - 1; r >= 0; --r) {
        const std::size_t start = out.size();
        for (int c = 0; c < img.width(); ++c) {
            if (gray) {
                out.push_back(img.at(r, c));
            } else {
                out.insert(out.end(), {img.at(r, c, 2), img.at(r, c, 1), img.at(r, c, 0)});
            }
        }
        out.resize(start + stride, 0);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()))) {
        throw ImageIoError("cannot write " + path.string());
    }
}

}  // namespace krig::io
