#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ecoscapes {

// 8-bit interleaved image, row-major. channels is 1 (grey), 2 (grey+alpha),
// 3 (RGB) or 4 (RGBA).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int width, int height, int channels, std::uint8_t fill = 0);

    bool empty() const { return width <= 0 || height <= 0; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool operator==(const Image&) const = default;
};

// Single-channel samples at their stored bit depth (8 or 16).
struct GraySamples {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(std::span<const std::uint8_t> bytes);

// 16-bit input is reduced to 8 bits; palettes are expanded.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

// Reads a greyscale PNG keeping 16-bit precision. Colour input is rejected.
GraySamples read_png_gray(const std::filesystem::path& path);

// Channel conversions. Pixels with alpha 0 become black.
Image to_rgb(const Image& image);
Image to_gray(const Image& image);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace ecoscapes
