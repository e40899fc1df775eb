#include "ecoscapes/satellite.hpp"

#include "expect_error.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <json.hpp>

#include <random>

using namespace ecoscapes;
using namespace ecoscapes::satellite;
using nlohmann::json;
using testsupport::code_of;
using ::testing::HasSubstr;

namespace {

Date day(const char* iso) { return parse_iso_date(iso); }

class ListClient final : public SatelliteClient {
public:
    std::vector<SceneRef> catalog;
    std::map<raster::BandId, raster::BandRaster> rasters;
    int searches = 0;

    std::vector<SceneRef> search_scenes(const geo::GeoBoundingBox&, const DateWindow&,
                                        double) override {
        ++searches;
        return catalog;
    }
    std::map<raster::BandId, raster::BandRaster> fetch(const SceneRef&, const geo::GeoBoundingBox&,
                                                       const std::set<raster::BandId>& bands,
                                                       double) override {
        std::map<raster::BandId, raster::BandRaster> out;
        for (auto b : bands) out[b] = rasters.at(b);
        return out;
    }
};

const geo::GeoBoundingBox& box() {
    static const auto b = geo::bounding_box(geo::GeoPoint::make(49.3985, 10.8887), 2500);
    return b;
}

json grid(int w, int h, double base, double step) {
    json values = json::array();
    for (int i = 0; i < w * h; ++i) values.push_back(base + step * (i % 5));
    return {{"width", w}, {"height", h}, {"values", values}};
}

json process_body(int w, int h) {
    json bands = json::object();
    const std::map<std::string, double> base = {{"B02", 0.04}, {"B03", 0.06}, {"B04", 0.05},
                                                {"B08", 0.30}, {"B8A", 0.28}, {"B11", 0.20}};
    for (const auto& [code, v] : base) bands[code] = grid(w, h, v, 0.01);
    json mask = grid(w, h, 1, 0);
    mask["values"][0] = 0;
    return {{"bands", bands}, {"dataMask", mask}};
}

std::shared_ptr<testsupport::FakeTransport> fixture_api() {
    auto fake = std::make_shared<testsupport::FakeTransport>();
    const auto geo_bytes = read_file_bytes(testsupport::fixtures_dir() / "nominatim_rosstal.json");
    fake->reply("/search", 200, std::string(geo_bytes.begin(), geo_bytes.end()));
    fake->reply("/catalog/search", 200, R"({"features":[
        {"id":"old","properties":{"datetime":"2024-03-15T10:20:00Z","eo:cloud_cover":0.8}},
        {"id":"cloudy","properties":{"datetime":"2024-07-01T10:20:00Z","eo:cloud_cover":2.0}},
        {"id":"new","properties":{"datetime":"2024-06-01T10:20:00Z","eo:cloud_cover":0.5}}]})");
    fake->reply("/process", 200, process_body(12, 8).dump());
    return fake;
}

AcquisitionConfig api_config(const std::filesystem::path& empty_root) {
    AcquisitionConfig cfg;
    cfg.manual_root = empty_root;
    cfg.geocoder_url = "https://geo.test/search";
    cfg.satellite_api_url = "https://sat.test/";
    cfg.api_token = "secret";
    cfg.today = day("2024-06-30");
    return cfg;
}

}  // namespace

TEST(Dates, ParseAndFormat) {
    EXPECT_EQ(format_iso_date(day("2024-02-29")), "2024-02-29");
    EXPECT_EQ(day("2024-06-01T10:20:00Z"), day("2024-06-01"));
    EXPECT_EQ(code_of([] { parse_iso_date("2023-02-29"); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([] { parse_iso_date("June 1"); }), Errc::InvalidArgument);
    const auto w = DateWindow::preceding_year(day("2024-06-30"));
    EXPECT_EQ(w.from, day("2023-07-01"));
    EXPECT_TRUE(w.contains(day("2024-06-30")));
    EXPECT_FALSE(w.contains(day("2023-06-30")));
}

TEST(ManualImages, AbsentDirectoryGivesNothing) {
    testsupport::TempDir tmp;
    EXPECT_FALSE(load_manual_images(tmp.path(), "Erlangen").has_value());
    EXPECT_FALSE(missing_manual_files(tmp.path(), "Erlangen").has_value());
}

TEST(ManualImages, CompleteFixtureSet) {
    const auto set = load_manual_images(testsupport::manual_root(), testsupport::kFixtureLocation);
    ASSERT_TRUE(set.has_value());
    EXPECT_EQ(set->source, ImageSource::Manual);
    EXPECT_EQ(set->location, testsupport::kFixtureLocation);
    EXPECT_EQ(set->rgb.channels, 3);
    EXPECT_EQ(set->moisture.channels, 3);
    EXPECT_EQ(set->water.channels, 1);
    EXPECT_EQ(set->rgb.width, 96);
}

TEST(ManualImages, FolderNameIsCaseSensitive) {
    EXPECT_FALSE(load_manual_images(testsupport::manual_root(), "roßtal").has_value());
}

TEST(ManualImages, IncompleteSetListsMissingFiles) {
    testsupport::TempDir tmp;
    write_png(tmp.path() / "Erlangen" / "rgb.png", Image(4, 4, 3));
    try {
        load_manual_images(tmp.path(), "Erlangen");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IncompleteManualSet);
        EXPECT_THAT(e.message(), HasSubstr("moisture.png, water.png"));
    }
    EXPECT_EQ(*missing_manual_files(tmp.path(), "Erlangen"),
              (std::vector<std::string>{"moisture.png", "water.png"}));
}

TEST(ManualImages, RescaledAndUnreadable) {
    testsupport::TempDir tmp;
    const auto dir = tmp.path() / "Big";
    write_png(dir / "rgb.png", Image(2048, 1000, 3, 10));
    write_png(dir / "moisture.png", Image(2048, 1000, 4, 20));
    write_png(dir / "water.png", Image(2048, 1000, 1, 30));
    const auto set = load_manual_images(tmp.path(), "Big", {1024, false});
    EXPECT_EQ(set->rgb.width, 1024);
    EXPECT_EQ(set->rgb.height, 500);
    EXPECT_EQ(set->moisture.channels, 3);
    EXPECT_EQ(set->water.height, 500);

    write_file_bytes(dir / "water.png", std::vector<std::uint8_t>{'n', 'o', 'p', 'e'});
    EXPECT_EQ(code_of([&] { load_manual_images(tmp.path(), "Big"); }), Errc::UnreadableImage);
}

TEST(ManualImages, InvertWaterForBrowserDownloads) {
    testsupport::TempDir tmp;
    const auto dir = tmp.path() / "Lake";
    write_png(dir / "rgb.png", Image(3, 1, 3));
    write_png(dir / "moisture.png", Image(3, 1, 3));
    Image water(3, 1, 2);
    water.pixels = {0, 255, 255, 255, 40, 0};  // water (dark), land (white), transparent
    write_png(dir / "water.png", water);
    const auto set = load_manual_images(tmp.path(), "Lake", {1024, true});
    EXPECT_EQ(set->water.pixels, (std::vector<std::uint8_t>{255, 0, 0}));
}

TEST(DiscoverScenes, FixtureCatalog) {
    ListClient client;
    client.catalog = {{"a", day("2024-06-01"), 0.005},
                      {"b", day("2024-07-01"), 0.02},
                      {"c", day("2024-03-15"), 0.008}};
    const auto w = DateWindow{day("2024-01-01"), day("2024-12-31")};
    const auto got = discover_scenes(box(), w, 0.01, client);
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[0].scene_id, "a");
    EXPECT_EQ(got[1].scene_id, "c");
    const auto all = discover_scenes(box(), w, 1.0, client);
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(all[0].scene_id, "b");
}

TEST(DiscoverScenes, NothingEligibleSuggestsRaisingCeiling) {
    ListClient client;
    try {
        discover_scenes(box(), DateWindow::preceding_year(day("2024-06-30")), 0.01, client);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoEligibleScene);
        EXPECT_THAT(e.message(), HasSubstr("max_cloud"));
    }
}

TEST(DiscoverScenes, Preconditions) {
    ListClient client;
    EXPECT_EQ(code_of([&] {
                  discover_scenes(box(), {day("2024-02-01"), day("2024-01-01")}, 0.01, client);
              }),
              Errc::InvalidArgument);
    const auto w = DateWindow::preceding_year(day("2024-06-30"));
    EXPECT_EQ(code_of([&] { discover_scenes(box(), w, 0.0, client); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { discover_scenes(box(), w, 1.5, client); }), Errc::InvalidArgument);
    EXPECT_EQ(client.searches, 0);
}

TEST(DiscoverScenes, RandomCatalogsMatchOracle) {
    std::mt19937_64 rng(99);
    const Date today = day("2024-06-30");
    std::uniform_int_distribution<int> n(0, 30), offset(-500, 20);
    std::uniform_real_distribution<double> cloud(0.0, 0.3), ceiling(0.001, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        ListClient client;
        for (int i = 0, k = n(rng); i < k; ++i) {
            client.catalog.push_back(
                {"s" + std::to_string(i), today + std::chrono::days(offset(rng)), cloud(rng)});
        }
        const double max_cloud = ceiling(rng);
        const auto w = DateWindow::preceding_year(today);
        const auto want = oracle::discover(client.catalog, w, max_cloud);
        if (want.empty()) {
            EXPECT_EQ(code_of([&] { discover_scenes(box(), w, max_cloud, client); }),
                      Errc::NoEligibleScene);
            continue;
        }
        const auto got = discover_scenes(box(), w, max_cloud, client);
        ASSERT_EQ(got, want);
        const auto newest = std::max_element(
            want.begin(), want.end(),
            [](const SceneRef& a, const SceneRef& b) { return a.sensing_date < b.sensing_date; });
        EXPECT_EQ(got.front().sensing_date, newest->sensing_date);
    }
}

TEST(HttpClient, CatalogRequestShapeAndPercentCloudCover) {
    auto fake = fixture_api();
    HttpSatelliteClient client(fake, "https://sat.test/", "secret");
    const auto w = DateWindow::preceding_year(day("2024-06-30"));
    const auto scenes = client.search_scenes(box(), w, 0.01);
    ASSERT_EQ(scenes.size(), 3u);
    EXPECT_DOUBLE_EQ(scenes[1].cloud_fraction, 0.02);

    const auto req = fake->requests().at(0);
    EXPECT_EQ(req.method, "POST");
    EXPECT_EQ(req.url, "https://sat.test/catalog/search");
    EXPECT_EQ(req.headers.find("Authorization")->second, "Bearer secret");
    const auto body = json::parse(req.body);
    EXPECT_EQ(body["datetime"], "2023-07-01T00:00:00Z/2024-06-30T23:59:59Z");
    EXPECT_DOUBLE_EQ(body["bbox"][0].get<double>(), box().min_lon);
    EXPECT_DOUBLE_EQ(body["bbox"][3].get<double>(), box().max_lat);
    EXPECT_DOUBLE_EQ(body["max_cloud_fraction"].get<double>(), 0.01);
}

TEST(HttpClient, MalformedCatalog) {
    auto fake = std::make_shared<testsupport::FakeTransport>();
    HttpSatelliteClient client(fake, "https://sat.test", "t");
    const auto w = DateWindow::preceding_year(day("2024-06-30"));
    fake->reply("/catalog/search", 200, R"({"nope":1})");
    EXPECT_EQ(code_of([&] { client.search_scenes(box(), w, 0.01); }), Errc::MalformedResponse);
    fake->reply("/catalog/search", 200,
                R"({"features":[{"id":"x","properties":{"datetime":"2024-01-01","eo:cloud_cover":140}}]})");
    EXPECT_EQ(code_of([&] { client.search_scenes(box(), w, 0.01); }), Errc::MalformedResponse);
    fake->reply("/catalog/search", 500, "oops");
    EXPECT_EQ(code_of([&] { client.search_scenes(box(), w, 0.01); }), Errc::ServiceUnreachable);
}

TEST(FetchBands, TwoBandsShareGeometryAndMask) {
    auto fake = fixture_api();
    HttpSatelliteClient client(fake, "https://sat.test", "t");
    const SceneRef scene{"new", day("2024-06-01"), 0.005};
    const auto bands = fetch_bands(scene, box(), {raster::BandId::B03, raster::BandId::B08}, client);
    ASSERT_EQ(bands.size(), 2u);
    const auto& b03 = bands.at(raster::BandId::B03);
    const auto& b08 = bands.at(raster::BandId::B08);
    EXPECT_EQ(b03.width, 12);
    EXPECT_EQ(b03.height, b08.height);
    EXPECT_EQ(b03.data_mask, b08.data_mask);
    EXPECT_EQ(b03.data_mask[0], 0);
    EXPECT_EQ(b03.data_mask[1], 1);

    const auto body = json::parse(fake->requests().back().body);
    EXPECT_EQ(body["bands"], json::array({"B03", "B08"}));
    EXPECT_EQ(body["scene_id"], "new");
    EXPECT_EQ(body["time_range"]["from"], "2024-06-01T00:00:00Z");
}

TEST(FetchBands, Errors) {
    auto fake = std::make_shared<testsupport::FakeTransport>();
    HttpSatelliteClient client(fake, "https://sat.test", "t");
    const SceneRef scene{"s", day("2024-06-01"), 0.0};
    EXPECT_EQ(code_of([&] { fetch_bands(scene, box(), {}, client); }), Errc::InvalidArgument);

    json body = {{"bands", {{"B03", grid(64, 64, 0.1, 0)}, {"B08", grid(32, 32, 0.1, 0)}}}};
    fake->reply("/process", 200, body.dump());
    EXPECT_EQ(code_of([&] {
                  fetch_bands(scene, box(), {raster::BandId::B03, raster::BandId::B08}, client);
              }),
              Errc::GeometryMismatch);

    EXPECT_EQ(code_of([&] { fetch_bands(scene, box(), {raster::BandId::B11}, client); }),
              Errc::BandUnavailable);

    body = {{"bands", {{"B03", grid(2, 2, 0.1, 0)}}}, {"dataMask", grid(3, 1, 1, 0)}};
    fake->reply("/process", 200, body.dump());
    EXPECT_EQ(code_of([&] { fetch_bands(scene, box(), {raster::BandId::B03}, client); }),
              Errc::GeometryMismatch);

    body = {{"bands", {{"B03", grid(2, 1, -0.5, 0)}}}};
    fake->reply("/process", 200, body.dump());
    EXPECT_EQ(code_of([&] { fetch_bands(scene, box(), {raster::BandId::B03}, client); }),
              Errc::MalformedResponse);
}

TEST(Acquire, FromFixtureApiWritesThreeImages) {
    testsupport::TempDir tmp;
    auto fake = fixture_api();
    const auto out = tmp.path() / "out";
    const auto set = acquire("Roßtal", api_config(tmp.path() / "none"), fake, out);
    EXPECT_EQ(set.source, ImageSource::Api);
    EXPECT_EQ(set.rgb.width, 12);
    for (const char* name : kImageFileNames) EXPECT_TRUE(std::filesystem::exists(out / name)) << name;

    const auto reqs = fake->requests();
    ASSERT_EQ(reqs.size(), 3u);
    EXPECT_THAT(reqs[0].url, HasSubstr("geo.test/search?"));
    const auto process = json::parse(reqs[2].body);
    EXPECT_EQ(process["scene_id"], "new");
    EXPECT_EQ(process["bands"].size(), 6u);
    // Default 5 km side: 2.5 km either way of the centre.
    EXPECT_NEAR(process["bbox"][3].get<double>() - process["bbox"][1].get<double>(),
                5000.0 / geo::kMetersPerDegree, 1e-9);
}

TEST(Acquire, ManualSetMakesNoRequests) {
    auto recorder = std::make_shared<http::RecordingTransport>();
    auto cfg = api_config(testsupport::manual_root());
    const auto set = acquire(testsupport::kFixtureLocation, cfg, recorder);
    EXPECT_EQ(set.source, ImageSource::Manual);
    EXPECT_EQ(recorder->call_count(), 0u);
}

TEST(Acquire, MissingCredentialsFailBeforeAnyRequest) {
    testsupport::TempDir tmp;
    auto recorder = std::make_shared<http::RecordingTransport>();
    auto cfg = api_config(tmp.path());
    cfg.api_token.reset();
    EXPECT_EQ(code_of([&] { acquire("Erlangen", cfg, recorder); }), Errc::Configuration);
    cfg.api_token = "t";
    cfg.satellite_api_url.clear();
    EXPECT_EQ(code_of([&] { acquire("Erlangen", cfg, recorder); }), Errc::Configuration);
    EXPECT_EQ(recorder->call_count(), 0u);
}

TEST(Acquire, ErrorsNameTheFailingStage) {
    testsupport::TempDir tmp;
    auto fake = fixture_api();
    fake->reply("/catalog/search", 200, R"({"features":[]})");
    try {
        acquire("Roßtal", api_config(tmp.path()), fake);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoEligibleScene);
        EXPECT_EQ(e.stage(), "discover_scenes");
    }
    fake->reply("/search", 200, "[]");
    try {
        acquire("Roßtal", api_config(tmp.path()), fake);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoMatch);
        EXPECT_EQ(e.stage(), "geocode");
    }
}

TEST(RenderImageSet, NeedsAllBands) {
    ListClient client;
    std::map<raster::BandId, raster::BandRaster> bands;
    raster::BandRaster r;
    r.width = 1;
    r.height = 1;
    r.values = {0.1};
    r.data_mask = {1};
    for (auto id : raster::kAllBands) {
        r.band = id;
        bands[id] = r;
    }
    EXPECT_NO_THROW(render_image_set(bands, "x"));
    bands.erase(raster::BandId::B8A);
    EXPECT_EQ(code_of([&] { render_image_set(bands, "x"); }), Errc::BandUnavailable);
}
