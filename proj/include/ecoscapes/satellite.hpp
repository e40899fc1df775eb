#pragma once

#include "ecoscapes/geo.hpp"
#include "ecoscapes/http.hpp"
#include "ecoscapes/image.hpp"
#include "ecoscapes/raster.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ecoscapes::satellite {

using Date = std::chrono::sys_days;

// "YYYY-MM-DD", optionally followed by a "T..." time part which is ignored.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

struct DateWindow {
    Date from;
    Date to;

    bool contains(Date d) const { return d >= from && d <= to; }
    // The 365 days up to and including `today`.
    static DateWindow preceding_year(Date today);
};

struct SceneRef {
    std::string scene_id;
    Date sensing_date;
    double cloud_fraction = 0.0;

    bool operator==(const SceneRef&) const = default;
};

enum class ImageSource { Manual, Api };

struct ImageSet {
    Image rgb;       // 3 channels
    Image moisture;  // 3 channels
    Image water;     // 1 channel, water white
    ImageSource source = ImageSource::Manual;
    std::string location;
};

inline constexpr std::array<const char*, 3> kImageFileNames = {"rgb.png", "moisture.png",
                                                               "water.png"};

struct ManualOptions {
    int max_side = 1024;
    // Manual water.png follows the browser ramp (water dark); flip it.
    bool invert_water = false;
};

/// Manually supplied images from `<root>/<location>/`. Returns nothing when
/// the directory does not exist; throws IncompleteManualSet naming the
/// missing files when it exists but lacks some of them.
std::optional<ImageSet> load_manual_images(const std::filesystem::path& root,
                                           const std::string& location,
                                           const ManualOptions& options = {});

/// File names from kImageFileNames missing under `<root>/<location>/`.
/// nullopt when the directory itself is absent.
std::optional<std::vector<std::string>> missing_manual_files(const std::filesystem::path& root,
                                                             const std::string& location);

// Remote Sentinel-2 catalog and process service.
class SatelliteClient {
public:
    virtual ~SatelliteClient() = default;
    virtual std::vector<SceneRef> search_scenes(const geo::GeoBoundingBox& bbox,
                                                const DateWindow& window, double max_cloud) = 0;
    virtual std::map<raster::BandId, raster::BandRaster> fetch(
        const SceneRef& scene, const geo::GeoBoundingBox& bbox,
        const std::set<raster::BandId>& bands, double max_cloud) = 0;
};

// JSON-over-HTTP client:
//   POST {base}/catalog/search  -> {"features":[{"id", "properties":{"datetime","eo:cloud_cover"}}]}
//   POST {base}/process         -> {"bands":{"B03":{"width","height","values"}}, "dataMask":{...}}
// eo:cloud_cover is a percentage, as in STAC catalogs.
class HttpSatelliteClient final : public SatelliteClient {
public:
    HttpSatelliteClient(std::shared_ptr<http::Transport> transport, std::string base_url,
                        std::string token);

    std::vector<SceneRef> search_scenes(const geo::GeoBoundingBox& bbox, const DateWindow& window,
                                        double max_cloud) override;
    std::map<raster::BandId, raster::BandRaster> fetch(const SceneRef& scene,
                                                       const geo::GeoBoundingBox& bbox,
                                                       const std::set<raster::BandId>& bands,
                                                       double max_cloud) override;

private:
    std::string post(const std::string& path, const std::string& body);

    std::shared_ptr<http::Transport> transport_;
    std::string base_url_;
    std::string token_;
};

/// Scenes with cloud_fraction strictly below max_cloud and a sensing date
/// inside the window, newest first (ties by scene id). Throws
/// NoEligibleScene when none qualify.
std::vector<SceneRef> discover_scenes(const geo::GeoBoundingBox& bbox, const DateWindow& window,
                                      double max_cloud, SatelliteClient& client);

/// Band rasters for one scene, checked for shared geometry.
std::map<raster::BandId, raster::BandRaster> fetch_bands(const SceneRef& scene,
                                                         const geo::GeoBoundingBox& bbox,
                                                         const std::set<raster::BandId>& bands,
                                                         SatelliteClient& client,
                                                         double max_cloud = 0.01);

struct RenderOptions {
    double true_color_gain = 2.5;
    int max_side = 1024;
    raster::WaterPolarity water_polarity = raster::WaterPolarity::WaterWhite;
};

/// rgb from B04/B03/B02, moisture from (B8A, B11), water from (B03, B08).
ImageSet render_image_set(const std::map<raster::BandId, raster::BandRaster>& bands,
                          const std::string& location, const RenderOptions& options = {});

void write_image_set(const ImageSet& images, const std::filesystem::path& dir);

struct AcquisitionConfig {
    std::filesystem::path manual_root = "satellite_data";
    bool invert_manual_water = false;
    std::string geocoder_url = std::string(geo::GeocodingClient::kDefaultUrl);
    std::string satellite_api_url;
    std::optional<std::string> api_token;
    double bbox_side_m = 5000.0;
    double max_cloud = 0.01;
    std::optional<Date> today;
    int max_side = 1024;
    double true_color_gain = 2.5;
};

/// Manual images when present, otherwise geocode, pick the newest
/// eligible scene and render it. Errors carry the failing stage name.
/// With `output_dir`, the three images are written there.
ImageSet acquire(const std::string& location, const AcquisitionConfig& config,
                 std::shared_ptr<http::Transport> transport,
                 const std::optional<std::filesystem::path>& output_dir = std::nullopt);

}  // namespace ecoscapes::satellite
