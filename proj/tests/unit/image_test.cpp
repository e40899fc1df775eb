#include "ecoscapes/image.hpp"

#include "expect_error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ecoscapes;
using testsupport::code_of;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h, int c) {
    Image img(w, h, c);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
    return img;
}

}  // namespace

TEST(Png, RoundTripsEveryChannelLayout) {
    std::mt19937_64 rng(1);
    for (int c = 1; c <= 4; ++c) {
        const auto img = random_image(rng, 13, 7, c);
        const auto back = decode_png(encode_png(img));
        EXPECT_EQ(back, img) << "channels " << c;
    }
}

TEST(Png, EncodingIsDeterministic) {
    std::mt19937_64 rng(2);
    const auto img = random_image(rng, 40, 30, 3);
    EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(Png, RejectsGarbageAndMalformedImages) {
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5, 6, 7, 8, 9};
    EXPECT_EQ(code_of([&] { decode_png(junk); }), Errc::UnreadableImage);
    auto bytes = encode_png(Image(8, 8, 3, 9));
    bytes.resize(bytes.size() / 2);
    EXPECT_EQ(code_of([&] { decode_png(bytes); }), Errc::UnreadableImage);
    Image bad(4, 4, 3);
    bad.pixels.pop_back();
    EXPECT_EQ(code_of([&] { encode_png(bad); }), Errc::InvalidArgument);
}

TEST(Png, FileRoundTripCreatesDirectories) {
    testsupport::TempDir tmp;
    const auto path = tmp.path() / "a" / "b" / "img.png";
    const Image img(3, 2, 1, 200);
    write_png(path, img);
    EXPECT_EQ(read_png(path), img);
    EXPECT_EQ(code_of([&] { read_png(tmp.path() / "missing.png"); }), Errc::UnreadableImage);
}

TEST(Png, SixteenBitGreyKeepsPrecision) {
    const auto g = read_png_gray(testsupport::fixtures_dir() / "gray16.png");
    EXPECT_EQ(g.bit_depth, 16);
    ASSERT_EQ(g.width, 3);
    ASSERT_EQ(g.height, 2);
    EXPECT_EQ(g.samples, (std::vector<std::uint16_t>{0, 1000, 65535, 256, 40000, 7}));
    const auto reduced = read_png(testsupport::fixtures_dir() / "gray16.png");
    EXPECT_EQ(reduced.channels, 1);
    EXPECT_EQ(reduced.at(2, 0), 255);
}

TEST(Png, GreyReaderRejectsColour) {
    testsupport::TempDir tmp;
    write_png(tmp.path() / "rgb.png", Image(2, 2, 3));
    EXPECT_EQ(code_of([&] { read_png_gray(tmp.path() / "rgb.png"); }), Errc::UnreadableImage);
}

TEST(Convert, TransparentPixelsBecomeBlack) {
    const auto rgba = read_png(testsupport::fixtures_dir() / "rgba_transparent.png");
    ASSERT_EQ(rgba.channels, 4);
    const auto rgb = to_rgb(rgba);
    EXPECT_EQ(rgb.channels, 3);
    EXPECT_EQ(rgb.pixels, (std::vector<std::uint8_t>{0, 0, 0, 0, 0, 0, 0, 0, 0, 10, 20, 30}));
    EXPECT_EQ(to_gray(rgba).pixels, (std::vector<std::uint8_t>{0, 0, 0, 18}));
}

TEST(Convert, GreyUsesRec601Weights) {
    Image rgb(4, 1, 3);
    rgb.pixels = {255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 200, 30};
    const auto g = to_gray(rgb);
    // (299 r + 587 g + 114 b + 500) / 1000
    EXPECT_EQ(g.pixels, (std::vector<std::uint8_t>{76, 150, 29, 124}));
    Image grey(2, 1, 1);
    grey.pixels = {7, 250};
    EXPECT_EQ(to_gray(grey), grey);
    EXPECT_EQ(to_rgb(grey).pixels, (std::vector<std::uint8_t>{7, 7, 7, 250, 250, 250}));
}

TEST(Files, ByteRoundTrip) {
    testsupport::TempDir tmp;
    const std::vector<std::uint8_t> data{0, 1, 255, 10};
    write_file_bytes(tmp.path() / "x" / "d.bin", data);
    EXPECT_EQ(read_file_bytes(tmp.path() / "x" / "d.bin"), data);
    EXPECT_EQ(code_of([&] { read_file_bytes(tmp.path() / "nope"); }), Errc::Io);
}
