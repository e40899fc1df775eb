#include "ecoscapes/raster.hpp"

#include "ecoscapes/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecoscapes::raster {

namespace {

struct BandInfo {
    BandId id;
    std::string_view code;
    double wavelength_nm;
};

constexpr std::array<BandInfo, 6> kBandTable = {{
    {BandId::B02, "B02", 492.1},
    {BandId::B03, "B03", 559.0},
    {BandId::B04, "B04", 665.0},
    {BandId::B08, "B08", 833.0},
    {BandId::B8A, "B8A", 864.0},
    {BandId::B11, "B11", 1610.0},
}};

const BandInfo& info(BandId band) {
    return kBandTable[static_cast<std::size_t>(band)];
}

void require_same_geometry(const BandRaster& a, const BandRaster& b) {
    if (a.width != b.width || a.height != b.height) {
        throw Error(Errc::GeometryMismatch,
                    std::string(band_code(a.band)) + " is " + std::to_string(a.width) + "x" +
                        std::to_string(a.height) + " but " + std::string(band_code(b.band)) +
                        " is " + std::to_string(b.width) + "x" + std::to_string(b.height));
    }
}

}  // namespace

std::string_view band_code(BandId band) { return info(band).code; }

double band_wavelength_nm(BandId band) { return info(band).wavelength_nm; }

std::optional<BandId> parse_band(std::string_view code) {
    for (const auto& b : kBandTable) {
        if (b.code == code) return b.id;
    }
    return std::nullopt;
}

void BandRaster::validate() const {
    if (width <= 0 || height <= 0) {
        throw Error(Errc::InvalidArgument, std::string(band_code(band)) + " raster is empty");
    }
    if (values.size() != size() || data_mask.size() != size()) {
        throw Error(Errc::InvalidArgument,
                    std::string(band_code(band)) + " raster length does not match its geometry");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (data_mask[i] != 0 && (!std::isfinite(values[i]) || values[i] < 0.0)) {
            throw Error(Errc::InvalidArgument,
                        std::string(band_code(band)) + " has a negative or non-finite reflectance");
        }
    }
}

IndexRaster normalized_difference(const BandRaster& a, const BandRaster& b) {
    require_same_geometry(a, b);
    a.validate();
    b.validate();
    IndexRaster out;
    out.width = a.width;
    out.height = a.height;
    out.values.assign(a.size(), 0.0);
    out.valid.assign(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.data_mask[i] == 0 || b.data_mask[i] == 0) continue;
        const double sum = a.values[i] + b.values[i];
        if (sum == 0.0) continue;
        out.values[i] = (a.values[i] - b.values[i]) / sum;
        out.valid[i] = 1;
    }
    return out;
}

std::uint8_t quantize_unit(double v) {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

Image compose_true_color(const BandRaster& red, const BandRaster& green, const BandRaster& blue,
                         double gain) {
    require_same_geometry(red, green);
    require_same_geometry(red, blue);
    red.validate();
    green.validate();
    blue.validate();
    Image out(red.width, red.height, 3);
    for (std::size_t i = 0; i < red.size(); ++i) {
        if (red.data_mask[i] == 0 || green.data_mask[i] == 0 || blue.data_mask[i] == 0) continue;
        out.pixels[3 * i] = quantize_unit(gain * red.values[i]);
        out.pixels[3 * i + 1] = quantize_unit(gain * green.values[i]);
        out.pixels[3 * i + 2] = quantize_unit(gain * blue.values[i]);
    }
    return out;
}

Image render_moisture(const IndexRaster& index, Rgb nodata) {
    Image out(index.width, index.height, 3);
    for (std::size_t i = 0; i < index.size(); ++i) {
        std::uint8_t* px = &out.pixels[3 * i];
        if (index.valid[i] == 0) {
            px[0] = nodata.r;
            px[1] = nodata.g;
            px[2] = nodata.b;
            continue;
        }
        const double v = std::clamp(index.values[i], -1.0, 1.0);
        if (v < 0.0) {
            const auto fade = quantize_unit(1.0 + v);
            px[0] = 255;
            px[1] = fade;
            px[2] = fade;
        } else {
            const auto fade = quantize_unit(1.0 - v);
            px[0] = fade;
            px[1] = fade;
            px[2] = 255;
        }
    }
    return out;
}

Image render_water(const IndexRaster& index, WaterPolarity polarity) {
    Image out(index.width, index.height, 1);
    for (std::size_t i = 0; i < index.size(); ++i) {
        const double v = index.values[i];
        if (index.valid[i] == 0 || v < 0.0 || v > 1.0) continue;
        out.pixels[i] = quantize_unit(polarity == WaterPolarity::WaterWhite ? v : 1.0 - v);
    }
    return out;
}

std::pair<int, int> rescaled_size(int width, int height, int max_side) {
    const int largest = std::max(width, height);
    if (largest <= max_side) return {width, height};
    auto scale = [&](int side) {
        // side * max_side / largest, rounded half-up, at least 1.
        const long long num = 2LL * side * max_side + largest;
        return std::max(1, static_cast<int>(num / (2LL * largest)));
    };
    if (width >= height) return {max_side, scale(height)};
    return {scale(width), max_side};
}

namespace {

struct Tap {
    int src;
    double weight;
};

// Box-filter taps mapping `in` samples onto `out` samples (out <= in).
std::vector<std::vector<Tap>> area_taps(int in, int out) {
    std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out));
    const double ratio = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
        const double lo = o * ratio;
        const double hi = (o + 1) * ratio;
        double total = 0.0;
        for (int s = static_cast<int>(std::floor(lo)); s < static_cast<int>(std::ceil(hi)) && s < in;
             ++s) {
            const double w = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
            if (w > 1e-12) {
                taps[o].push_back({s, w});
                total += w;
            }
        }
        for (auto& t : taps[o]) t.weight /= total;
    }
    return taps;
}

}  // namespace

Image rescale_max_side(const Image& image, int max_side) {
    if (image.empty()) {
        throw Error(Errc::InvalidArgument, "cannot rescale an empty image");
    }
    if (max_side < 1) {
        throw Error(Errc::InvalidArgument, "max_side must be at least 1");
    }
    const auto [out_w, out_h] = rescaled_size(image.width, image.height, max_side);
    if (out_w == image.width && out_h == image.height) return image;

    const int c = image.channels;
    const auto xtaps = area_taps(image.width, out_w);
    const auto ytaps = area_taps(image.height, out_h);

    std::vector<double> horiz(static_cast<std::size_t>(out_w) * image.height * c, 0.0);
    for (int y = 0; y < image.height; ++y) {
        for (int ox = 0; ox < out_w; ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (const auto& t : xtaps[ox]) acc += t.weight * image.at(t.src, y, ch);
                horiz[(static_cast<std::size_t>(y) * out_w + ox) * c + ch] = acc;
            }
        }
    }
    Image out(out_w, out_h, c);
    for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (const auto& t : ytaps[oy]) {
                    acc += t.weight * horiz[(static_cast<std::size_t>(t.src) * out_w + ox) * c + ch];
                }
                out.at(ox, oy, ch) =
                    static_cast<std::uint8_t>(std::clamp(std::floor(acc + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

BinaryMask threshold_mask(const Image& gray, int threshold) {
    if (gray.channels != 1) {
        throw Error(Errc::InvalidArgument, "threshold_mask expects a single-channel image");
    }
    BinaryMask out(gray.width, gray.height);
    for (std::size_t i = 0; i < gray.pixel_count(); ++i) {
        out.bits[i] = gray.pixels[i] >= threshold ? 1 : 0;
    }
    return out;
}

namespace {

// One separable pass. For erosion a sample survives when every in-bounds
// neighbour within `radius` is set; for dilation when any is.
void sweep(const std::uint8_t* in, std::uint8_t* out, int n, std::ptrdiff_t stride, int radius,
           bool erosion, std::vector<int>& prefix) {
    prefix.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (in[i * stride] != 0 ? 1 : 0);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - radius);
        const int hi = std::min(n - 1, i + radius);
        const int count = prefix[hi + 1] - prefix[lo];
        out[i * stride] = erosion ? (count == hi - lo + 1 ? 1 : 0) : (count > 0 ? 1 : 0);
    }
}

BinaryMask morph(const BinaryMask& mask, int radius, bool erosion) {
    if (radius < 0) {
        throw Error(Errc::InvalidArgument, "structuring element radius must be >= 0");
    }
    if (radius == 0 || mask.size() == 0) return mask;
    BinaryMask rows(mask.width, mask.height);
    std::vector<int> prefix;
    for (int y = 0; y < mask.height; ++y) {
        const std::size_t base = static_cast<std::size_t>(y) * mask.width;
        sweep(&mask.bits[base], &rows.bits[base], mask.width, 1, radius, erosion, prefix);
    }
    BinaryMask out(mask.width, mask.height);
    for (int x = 0; x < mask.width; ++x) {
        sweep(&rows.bits[x], &out.bits[x], mask.height, mask.width, radius, erosion, prefix);
    }
    return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) { return morph(mask, radius, true); }

BinaryMask dilate(const BinaryMask& mask, int radius) { return morph(mask, radius, false); }

BinaryMask open(const BinaryMask& mask, int radius) { return dilate(erode(mask, radius), radius); }

BinaryMask remove_small_components(const BinaryMask& mask, double min_pixels) {
    BinaryMask out = mask;
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::size_t> component;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (mask.bits[start] == 0 || seen[start] != 0) continue;
        component.clear();
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            component.push_back(idx);
            const int x = static_cast<int>(idx % mask.width);
            const int y = static_cast<int>(idx / mask.width);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                    const std::size_t n = static_cast<std::size_t>(ny) * mask.width + nx;
                    if (mask.bits[n] != 0 && seen[n] == 0) {
                        seen[n] = 1;
                        stack.push_back(n);
                    }
                }
            }
        }
        if (static_cast<double>(component.size()) < min_pixels) {
            for (auto idx : component) out.bits[idx] = 0;
        }
    }
    return out;
}

BinaryMask denoise_mask(const BinaryMask& mask, int opening_radius, double min_area_fraction) {
    if (opening_radius < 0) {
        throw Error(Errc::InvalidArgument, "opening radius must be >= 0");
    }
    if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0)) {
        throw Error(Errc::InvalidArgument, "min_area_fraction must lie in [0, 1)");
    }
    const BinaryMask opened = open(mask, opening_radius);
    return remove_small_components(opened, min_area_fraction * static_cast<double>(mask.size()));
}

double water_fraction(const BinaryMask& mask) {
    if (mask.size() == 0) return 0.0;
    const auto count = std::count(mask.bits.begin(), mask.bits.end(), std::uint8_t{1});
    return static_cast<double>(count) / static_cast<double>(mask.size());
}

Image mask_to_image(const BinaryMask& mask) {
    Image out(mask.width, mask.height, 1);
    for (std::size_t i = 0; i < mask.size(); ++i) out.pixels[i] = mask.bits[i] != 0 ? 255 : 0;
    return out;
}

}  // namespace ecoscapes::raster
