#include "ecoscapes/satellite.hpp"

#include "ecoscapes/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

namespace ecoscapes::satellite {

using nlohmann::json;
using raster::BandId;
using raster::BandRaster;

Date parse_iso_date(std::string_view text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const std::string head(text.substr(0, 10));
    if (text.size() < 10 || std::sscanf(head.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3 ||
        head[4] != '-' || head[7] != '-' || (text.size() > 10 && text[10] != 'T')) {
        throw Error(Errc::InvalidArgument, "not an ISO-8601 date: " + std::string(text));
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw Error(Errc::InvalidArgument, "invalid calendar date: " + std::string(text));
    }
    return Date{ymd};
}

std::string format_iso_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DateWindow DateWindow::preceding_year(Date today) {
    return {today - std::chrono::days{365}, today};
}

std::optional<std::vector<std::string>> missing_manual_files(const std::filesystem::path& root,
                                                             const std::string& location) {
    const auto dir = root / location;
    if (!std::filesystem::is_directory(dir)) {
        return std::nullopt;
    }
    std::vector<std::string> missing;
    for (const char* name : kImageFileNames) {
        if (!std::filesystem::is_regular_file(dir / name)) {
            missing.emplace_back(name);
        }
    }
    return missing;
}

std::optional<ImageSet> load_manual_images(const std::filesystem::path& root,
                                           const std::string& location,
                                           const ManualOptions& options) {
    const auto missing = missing_manual_files(root, location);
    if (!missing) {
        return std::nullopt;
    }
    if (!missing->empty()) {
        std::string list;
        for (const auto& m : *missing) list += (list.empty() ? "" : ", ") + m;
        throw Error(Errc::IncompleteManualSet,
                    (root / location).string() + " is missing " + list, "satellite_loader");
    }
    const auto dir = root / location;
    auto load = [&](const char* name) {
        try {
            return read_png(dir / name);
        } catch (const Error& e) {
            throw Error(Errc::UnreadableImage, e.message(), "satellite_loader");
        }
    };
    ImageSet set;
    set.source = ImageSource::Manual;
    set.location = location;
    set.rgb = raster::rescale_max_side(to_rgb(load("rgb.png")), options.max_side);
    set.moisture = raster::rescale_max_side(to_rgb(load("moisture.png")), options.max_side);
    const Image raw_water = load("water.png");
    Image water = to_gray(raw_water);
    if (options.invert_water) {
        // Transparent pixels are outside the browser ramp's range; keep them land.
        for (std::size_t i = 0; i < water.pixel_count(); ++i) {
            const bool transparent =
                (raw_water.channels == 2 && raw_water.pixels[i * 2 + 1] == 0) ||
                (raw_water.channels == 4 && raw_water.pixels[i * 4 + 3] == 0);
            water.pixels[i] = transparent ? 0 : static_cast<std::uint8_t>(255 - water.pixels[i]);
        }
    }
    set.water = raster::rescale_max_side(water, options.max_side);
    return set;
}

HttpSatelliteClient::HttpSatelliteClient(std::shared_ptr<http::Transport> transport,
                                         std::string base_url, std::string token)
    : transport_(std::move(transport)), base_url_(std::move(base_url)), token_(std::move(token)) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string HttpSatelliteClient::post(const std::string& path, const std::string& body) {
    http::Request req;
    req.method = "POST";
    req.url = base_url_ + path;
    req.body = body;
    req.content_type = "application/json";
    req.headers.emplace("Authorization", "Bearer " + token_);
    req.headers.emplace("Accept", "application/json");
    http::Response resp;
    try {
        resp = transport_->send(req);
    } catch (const Error& e) {
        throw Error(Errc::ServiceUnreachable, e.message());
    }
    if (resp.status < 200 || resp.status >= 300) {
        throw Error(Errc::ServiceUnreachable,
                    "POST " + req.url + " answered HTTP " + std::to_string(resp.status));
    }
    return resp.body;
}

namespace {

json bbox_json(const geo::GeoBoundingBox& bbox) {
    return json::array({bbox.min_lon, bbox.min_lat, bbox.max_lon, bbox.max_lat});
}

json parse_body(const std::string& body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::MalformedResponse, "expected a JSON object");
    }
    return doc;
}

struct Grid {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> present;  // 0 where the value was null
};

Grid parse_grid(const json& node, const std::string& what) {
    if (!node.is_object() || !node.contains("width") || !node.contains("height") ||
        !node.contains("values") || !node["values"].is_array() ||
        !node["width"].is_number_integer() || !node["height"].is_number_integer()) {
        throw Error(Errc::MalformedResponse, what + " needs integer width/height and a values array");
    }
    Grid g;
    g.width = node["width"].get<int>();
    g.height = node["height"].get<int>();
    const auto& vals = node["values"];
    if (g.width <= 0 || g.height <= 0 ||
        vals.size() != static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height)) {
        throw Error(Errc::MalformedResponse, what + " values do not match its geometry");
    }
    g.values.reserve(vals.size());
    g.present.reserve(vals.size());
    for (const auto& v : vals) {
        if (v.is_null()) {
            g.values.push_back(0.0);
            g.present.push_back(0);
        } else if (v.is_number()) {
            g.values.push_back(v.get<double>());
            g.present.push_back(1);
        } else {
            throw Error(Errc::MalformedResponse, what + " contains a non-numeric value");
        }
    }
    return g;
}

}  // namespace

std::vector<SceneRef> HttpSatelliteClient::search_scenes(const geo::GeoBoundingBox& bbox,
                                                         const DateWindow& window,
                                                         double max_cloud) {
    const json request = {
        {"bbox", bbox_json(bbox)},
        {"datetime", format_iso_date(window.from) + "T00:00:00Z/" + format_iso_date(window.to) +
                         "T23:59:59Z"},
        {"collections", json::array({"sentinel-2-l2a"})},
        {"max_cloud_fraction", max_cloud},
        {"limit", 100},
    };
    const json doc = parse_body(post("/catalog/search", request.dump()));
    if (!doc.contains("features") || !doc["features"].is_array()) {
        throw Error(Errc::MalformedResponse, "catalog response has no features array");
    }
    std::vector<SceneRef> scenes;
    for (const auto& f : doc["features"]) {
        if (!f.is_object() || !f.contains("id") || !f["id"].is_string() ||
            !f.contains("properties") || !f["properties"].is_object()) {
            throw Error(Errc::MalformedResponse, "catalog feature lacks id or properties");
        }
        const auto& props = f["properties"];
        if (!props.contains("datetime") || !props["datetime"].is_string() ||
            !props.contains("eo:cloud_cover") || !props["eo:cloud_cover"].is_number()) {
            throw Error(Errc::MalformedResponse, "catalog feature lacks datetime or eo:cloud_cover");
        }
        SceneRef scene;
        scene.scene_id = f["id"].get<std::string>();
        try {
            scene.sensing_date = parse_iso_date(props["datetime"].get<std::string>());
        } catch (const Error& e) {
            throw Error(Errc::MalformedResponse, e.message());
        }
        scene.cloud_fraction = props["eo:cloud_cover"].get<double>() / 100.0;
        if (!(scene.cloud_fraction >= 0.0 && scene.cloud_fraction <= 1.0)) {
            throw Error(Errc::MalformedResponse, "cloud cover outside [0, 100] for " + scene.scene_id);
        }
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

std::map<BandId, BandRaster> HttpSatelliteClient::fetch(const SceneRef& scene,
                                                        const geo::GeoBoundingBox& bbox,
                                                        const std::set<BandId>& bands,
                                                        double max_cloud) {
    json band_list = json::array();
    for (auto b : bands) band_list.push_back(std::string(raster::band_code(b)));
    const auto day = format_iso_date(scene.sensing_date);
    const json request = {
        {"scene_id", scene.scene_id},
        {"bbox", bbox_json(bbox)},
        {"time_range", {{"from", day + "T00:00:00Z"}, {"to", day + "T23:59:59Z"}}},
        {"bands", band_list},
        {"max_cloud_fraction", max_cloud},
    };
    const json doc = parse_body(post("/process", request.dump()));
    if (!doc.contains("bands") || !doc["bands"].is_object()) {
        throw Error(Errc::MalformedResponse, "process response has no bands object");
    }
    std::optional<Grid> mask;
    if (doc.contains("dataMask")) {
        mask = parse_grid(doc["dataMask"], "dataMask");
    }
    std::map<BandId, BandRaster> out;
    for (auto b : bands) {
        const std::string code(raster::band_code(b));
        if (!doc["bands"].contains(code)) {
            throw Error(Errc::BandUnavailable, "service returned no " + code);
        }
        Grid g = parse_grid(doc["bands"][code], code);
        BandRaster r;
        r.band = b;
        r.width = g.width;
        r.height = g.height;
        r.data_mask = g.present;
        if (mask) {
            if (mask->width != g.width || mask->height != g.height) {
                throw Error(Errc::GeometryMismatch, "dataMask geometry differs from " + code);
            }
            for (std::size_t i = 0; i < r.data_mask.size(); ++i) {
                if (mask->values[i] == 0.0) r.data_mask[i] = 0;
            }
        }
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            if (r.data_mask[i] != 0 && g.values[i] < 0.0) {
                throw Error(Errc::MalformedResponse, code + " contains a negative reflectance");
            }
        }
        r.values = std::move(g.values);
        out.emplace(b, std::move(r));
    }
    return out;
}

namespace {

bool newer_first(const SceneRef& a, const SceneRef& b) {
    if (a.sensing_date != b.sensing_date) return a.sensing_date > b.sensing_date;
    return a.scene_id < b.scene_id;
}

}  // namespace

std::vector<SceneRef> discover_scenes(const geo::GeoBoundingBox& bbox, const DateWindow& window,
                                      double max_cloud, SatelliteClient& client) {
    if (window.from > window.to) {
        throw Error(Errc::InvalidArgument, "empty date window", "discover_scenes");
    }
    if (!(max_cloud > 0.0 && max_cloud <= 1.0)) {
        throw Error(Errc::InvalidArgument, "max_cloud must lie in (0, 1]", "discover_scenes");
    }
    std::vector<SceneRef> scenes;
    try {
        scenes = client.search_scenes(bbox, window, max_cloud);
    } catch (const Error& e) {
        throw e.in_stage("discover_scenes");
    }
    std::erase_if(scenes, [&](const SceneRef& s) {
        return !(s.cloud_fraction < max_cloud) || !window.contains(s.sensing_date);
    });
    if (scenes.empty()) {
        char pct[32];
        std::snprintf(pct, sizeof pct, "%g", max_cloud * 100.0);
        throw Error(Errc::NoEligibleScene,
                    std::string("no scene between ") + format_iso_date(window.from) + " and " +
                        format_iso_date(window.to) + " has less than " + pct +
                        " % cloud cover; consider raising max_cloud",
                    "discover_scenes");
    }
    std::sort(scenes.begin(), scenes.end(), newer_first);
    return scenes;
}

std::map<BandId, BandRaster> fetch_bands(const SceneRef& scene, const geo::GeoBoundingBox& bbox,
                                         const std::set<BandId>& bands, SatelliteClient& client,
                                         double max_cloud) {
    if (bands.empty()) {
        throw Error(Errc::InvalidArgument, "no bands requested", "fetch_bands");
    }
    std::map<BandId, BandRaster> out;
    try {
        out = client.fetch(scene, bbox, bands, max_cloud);
    } catch (const Error& e) {
        throw e.in_stage("fetch_bands");
    }
    const BandRaster* first = nullptr;
    for (auto b : bands) {
        auto it = out.find(b);
        if (it == out.end()) {
            throw Error(Errc::BandUnavailable, std::string(raster::band_code(b)) + " missing",
                        "fetch_bands");
        }
        const BandRaster& r = it->second;
        if (first == nullptr) {
            first = &r;
        } else if (r.width != first->width || r.height != first->height ||
                   r.data_mask.size() != first->data_mask.size()) {
            throw Error(Errc::GeometryMismatch,
                        std::string(raster::band_code(first->band)) + " is " +
                            std::to_string(first->width) + "x" + std::to_string(first->height) +
                            " but " + std::string(raster::band_code(b)) + " is " +
                            std::to_string(r.width) + "x" + std::to_string(r.height),
                        "fetch_bands");
        }
    }
    return out;
}

ImageSet render_image_set(const std::map<BandId, BandRaster>& bands, const std::string& location,
                          const RenderOptions& options) {
    auto band = [&](BandId id) -> const BandRaster& {
        auto it = bands.find(id);
        if (it == bands.end()) {
            throw Error(Errc::BandUnavailable, std::string(raster::band_code(id)) + " missing",
                        "render");
        }
        return it->second;
    };
    ImageSet set;
    set.source = ImageSource::Api;
    set.location = location;
    set.rgb = raster::rescale_max_side(
        raster::compose_true_color(band(BandId::B04), band(BandId::B03), band(BandId::B02),
                                   options.true_color_gain),
        options.max_side);
    set.moisture = raster::rescale_max_side(
        raster::render_moisture(raster::normalized_difference(band(BandId::B8A), band(BandId::B11))),
        options.max_side);
    set.water = raster::rescale_max_side(
        raster::render_water(raster::normalized_difference(band(BandId::B03), band(BandId::B08)),
                            options.water_polarity),
        options.max_side);
    return set;
}

void write_image_set(const ImageSet& images, const std::filesystem::path& dir) {
    write_png(dir / "rgb.png", images.rgb);
    write_png(dir / "moisture.png", images.moisture);
    write_png(dir / "water.png", images.water);
}

ImageSet acquire(const std::string& location, const AcquisitionConfig& config,
                 std::shared_ptr<http::Transport> transport,
                 const std::optional<std::filesystem::path>& output_dir) {
    auto finish = [&](ImageSet set) {
        if (output_dir) write_image_set(set, *output_dir);
        return set;
    };
    if (auto manual = load_manual_images(config.manual_root, location,
                                         {config.max_side, config.invert_manual_water})) {
        return finish(std::move(*manual));
    }
    if (!config.api_token || config.api_token->empty()) {
        throw Error(Errc::Configuration,
                    "no manual images under " + (config.manual_root / location).string() +
                        " and no satellite API token configured",
                    "satellite_loader");
    }
    if (config.satellite_api_url.empty()) {
        throw Error(Errc::Configuration, "satellite_api_url is not configured", "satellite_loader");
    }
    if (!transport) {
        throw Error(Errc::Configuration, "no network transport available", "satellite_loader");
    }

    const geo::GeocodingClient geocoder(transport, config.geocoder_url);
    const geo::GeoPoint center = geo::geocode(location, geocoder);
    const auto bbox = geo::bounding_box(center, config.bbox_side_m / 2.0);

    const Date today = config.today.value_or(
        std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()));
    HttpSatelliteClient client(transport, config.satellite_api_url, *config.api_token);
    const auto scenes =
        discover_scenes(bbox, DateWindow::preceding_year(today), config.max_cloud, client);
    const std::set<BandId> all(raster::kAllBands.begin(), raster::kAllBands.end());
    const auto bands = fetch_bands(scenes.front(), bbox, all, client, config.max_cloud);
    try {
        return finish(render_image_set(bands, location, {config.true_color_gain, config.max_side, raster::WaterPolarity::WaterWhite}));
    } catch (const Error& e) {
        throw e.in_stage("render");
    }
}

}  // namespace ecoscapes::satellite
