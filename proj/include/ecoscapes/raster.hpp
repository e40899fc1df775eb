#pragma once

#include "ecoscapes/image.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecoscapes::raster {

enum class BandId { B02, B03, B04, B08, B8A, B11 };

inline constexpr std::array<BandId, 6> kAllBands = {BandId::B02, BandId::B03, BandId::B04,
                                                    BandId::B08, BandId::B8A, BandId::B11};

std::string_view band_code(BandId band);
double band_wavelength_nm(BandId band);
// Case-sensitive ("B8A", not "b8a").
std::optional<BandId> parse_band(std::string_view code);

// One spectral band. values and data_mask are row-major, width*height long.
struct BandRaster {
    BandId band = BandId::B02;
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> data_mask;  // 1 = valid observation

    // Throws InvalidArgument when lengths disagree with the geometry or a
    // valid reflectance is negative or non-finite.
    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
};

struct IndexRaster {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // meaningful only where valid
    std::vector<std::uint8_t> valid;

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 1 = water

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}
    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool operator==(const BinaryMask&) const = default;
};

/// (a - b) / (a + b) per pixel. No-data where either input is masked or
/// a + b == 0. Throws GeometryMismatch when shapes differ.
IndexRaster normalized_difference(const BandRaster& a, const BandRaster& b);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// 8-bit quantization of a unit-interval value, clamped, rounded half-up.
std::uint8_t quantize_unit(double v);

Image compose_true_color(const BandRaster& red, const BandRaster& green, const BandRaster& blue,
                         double gain = 2.5);

/// Red (-1) to white (0) to blue (+1).
Image render_moisture(const IndexRaster& index, Rgb nodata = {});

enum class WaterPolarity {
    WaterWhite,   // index 1 -> 255
    BrowserRamp,  // index 0 -> 255, 1 -> 0 (Copernicus browser custom script)
};

/// Indices outside [0, 1] and no-data render as 0.
Image render_water(const IndexRaster& index, WaterPolarity polarity = WaterPolarity::WaterWhite);

/// Proportional area-averaging downscale so the largest side equals
/// max_side. Images already within bounds are returned unchanged.
Image rescale_max_side(const Image& image, int max_side = 1024);

/// Target size for rescale_max_side, exposed for tests.
std::pair<int, int> rescaled_size(int width, int height, int max_side);

BinaryMask threshold_mask(const Image& gray, int threshold);

// Square structuring element of side 2r+1; windows are clipped at the
// image border, so a full mask stays full under erosion.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);
BinaryMask open(const BinaryMask& mask, int radius);

/// Drops 8-connected components with fewer than min_pixels pixels.
BinaryMask remove_small_components(const BinaryMask& mask, double min_pixels);

/// Opening with a (2r+1)^2 square, then removal of components smaller than
/// min_area_fraction of the image.
BinaryMask denoise_mask(const BinaryMask& mask, int opening_radius, double min_area_fraction);

double water_fraction(const BinaryMask& mask);

/// 0/255 greyscale rendering of a mask.
Image mask_to_image(const BinaryMask& mask);

struct WaterMaskParams {
    int threshold = 128;
    int opening_radius = 1;
    double min_area_fraction = 0.0005;
    double significance_cutoff = 0.001;
};

}  // namespace ecoscapes::raster
