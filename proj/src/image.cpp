#include "ecoscapes/image.hpp"

#include "ecoscapes/error.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace ecoscapes {

Image::Image(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c),
             fill) {}

namespace {

struct ReadCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t len) {
    auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cur->offset + len > cur->bytes.size()) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(out, cur->bytes.data() + cur->offset, len);
    cur->offset += len;
}

void write_callback(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void flush_callback(png_structp) {}

// libpng reports errors by longjmp. Everything that must survive the jump
// lives in these state structs, never in the frame that calls setjmp.
struct PngErrorSink {
    char message[256] = {};
};

void error_callback(png_structp png, png_const_charp msg) {
    auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
    std::strncpy(sink->message, msg, sizeof(sink->message) - 1);
    png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

struct RawDecode {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint8_t> data;
    std::vector<png_bytep> rows;
    PngErrorSink error;
};

// keep16 leaves 16-bit samples as big-endian byte pairs.
bool decode_raw_into(ReadCursor& cursor, bool keep16, RawDecode& out) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &out.error, error_callback,
                                             warning_callback);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &cursor, read_callback);
    png_read_info(png, info);

    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16 && !keep16) png_set_strip_16(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const auto rowbytes = png_get_rowbytes(png, info);
    out.data.resize(rowbytes * static_cast<std::size_t>(out.height));
    out.rows.resize(static_cast<std::size_t>(out.height));
    for (std::size_t y = 0; y < out.rows.size(); ++y) {
        out.rows[y] = out.data.data() + rowbytes * y;
    }
    png_read_image(png, out.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

RawDecode decode_raw(std::span<const std::uint8_t> bytes, bool keep16) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw Error(Errc::UnreadableImage, "not a PNG stream");
    }
    ReadCursor cursor{bytes, 0};
    RawDecode out;
    if (!decode_raw_into(cursor, keep16, out)) {
        throw Error(Errc::UnreadableImage,
                    out.error.message[0] != '\0' ? out.error.message : "PNG decode failed");
    }
    out.rows.clear();
    return out;
}

struct EncodeState {
    const Image* image = nullptr;
    std::vector<std::uint8_t> bytes;
    PngErrorSink error;
};

bool encode_into(EncodeState& state) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state.error, error_callback,
                                              warning_callback);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    const Image& image = *state.image;
    png_set_write_fn(png, &state.bytes, write_callback, flush_callback);
    static constexpr int kColorTypes[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA,
                                          PNG_COLOR_TYPE_RGB, PNG_COLOR_TYPE_RGB_ALPHA};
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, kColorTypes[image.channels - 1],
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    // Pinned so encoded bytes are reproducible.
    png_set_compression_level(png, 6);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, image.pixels.data() + stride * static_cast<std::size_t>(y));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
    if (image.empty() || image.channels < 1 || image.channels > 4 ||
        image.pixels.size() != image.pixel_count() * static_cast<std::size_t>(image.channels)) {
        throw Error(Errc::InvalidArgument, "cannot encode malformed image");
    }
    EncodeState state;
    state.image = &image;
    if (!encode_into(state)) {
        throw Error(Errc::Io, state.error.message[0] != '\0' ? state.error.message
                                                             : "PNG encode failed");
    }
    return std::move(state.bytes);
}

Image decode_png(std::span<const std::uint8_t> bytes) {
    RawDecode raw = decode_raw(bytes, false);
    Image img;
    img.width = raw.width;
    img.height = raw.height;
    img.channels = raw.channels;
    img.pixels = std::move(raw.data);
    return img;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::Io, "short write to " + path.string());
    }
}

Image read_png(const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const Error& e) {
        throw Error(Errc::UnreadableImage, e.message());
    }
    try {
        return decode_png(bytes);
    } catch (const Error& e) {
        throw Error(Errc::UnreadableImage, path.string() + ": " + e.message());
    }
}

void write_png(const std::filesystem::path& path, const Image& image) {
    write_file_bytes(path, encode_png(image));
}

GraySamples read_png_gray(const std::filesystem::path& path) {
    RawDecode raw;
    try {
        raw = decode_raw(read_file_bytes(path), true);
    } catch (const Error& e) {
        throw Error(Errc::UnreadableImage, path.string() + ": " + e.message());
    }
    if (raw.channels != 1) {
        throw Error(Errc::UnreadableImage, path.string() + ": expected a single-channel image");
    }
    GraySamples out;
    out.width = raw.width;
    out.height = raw.height;
    out.bit_depth = raw.bit_depth;
    out.samples.resize(static_cast<std::size_t>(raw.width) * raw.height);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = raw.bit_depth == 16
                             ? static_cast<std::uint16_t>((raw.data[2 * i] << 8) | raw.data[2 * i + 1])
                             : raw.data[i];
    }
    return out;
}

Image to_rgb(const Image& image) {
    if (image.channels == 3) return image;
    Image out(image.width, image.height, 3);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        const std::uint8_t* px = &image.pixels[i * image.channels];
        std::uint8_t r = 0, g = 0, b = 0;
        bool opaque = true;
        switch (image.channels) {
            case 1: r = g = b = px[0]; break;
            case 2: r = g = b = px[0]; opaque = px[1] != 0; break;
            case 4: r = px[0]; g = px[1]; b = px[2]; opaque = px[3] != 0; break;
            default: throw Error(Errc::InvalidArgument, "unsupported channel count");
        }
        if (!opaque) r = g = b = 0;
        out.pixels[i * 3] = r;
        out.pixels[i * 3 + 1] = g;
        out.pixels[i * 3 + 2] = b;
    }
    return out;
}

Image to_gray(const Image& image) {
    if (image.channels == 1) return image;
    Image out(image.width, image.height, 1);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        const std::uint8_t* px = &image.pixels[i * image.channels];
        int value = 0;
        bool opaque = true;
        switch (image.channels) {
            case 2: value = px[0]; opaque = px[1] != 0; break;
            case 3:
            case 4:
                // ITU-R BT.601 luma in fixed point, rounded half-up.
                value = (299 * px[0] + 587 * px[1] + 114 * px[2] + 500) / 1000;
                opaque = image.channels == 3 || px[3] != 0;
                break;
            default: throw Error(Errc::InvalidArgument, "unsupported channel count");
        }
        out.pixels[i] = opaque ? static_cast<std::uint8_t>(value) : 0;
    }
    return out;
}

}  // namespace ecoscapes
