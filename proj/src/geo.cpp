#include "ecoscapes/geo.hpp"

#include "ecoscapes/error.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

namespace ecoscapes::geo {

using nlohmann::json;

GeoPoint GeoPoint::make(double lat, double lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0 ||
        lon < -180.0 || lon > 180.0) {
        throw Error(Errc::InvalidArgument, "coordinates out of range: lat=" + std::to_string(lat) +
                                               " lon=" + std::to_string(lon));
    }
    return GeoPoint{lat, lon};
}

GeoBoundingBox bounding_box(const GeoPoint& center, double half_width_m) {
    if (!(half_width_m > 0.0) || !std::isfinite(half_width_m)) {
        throw Error(Errc::InvalidArgument, "half width must be positive", "bounding_box");
    }
    if (std::abs(center.lat) >= 89.0) {
        throw Error(Errc::PolarRegion, "latitude " + std::to_string(center.lat) + " is too close to a pole",
                    "bounding_box");
    }
    const double dlat = half_width_m / kMetersPerDegree;
    const double dlon =
        half_width_m / (kMetersPerDegree * std::cos(center.lat * std::numbers::pi / 180.0));
    GeoBoundingBox box;
    box.min_lat = center.lat - dlat;
    box.max_lat = center.lat + dlat;
    box.min_lon = center.lon - dlon;
    box.max_lon = center.lon + dlon;
    box.center = center;
    box.half_width_m = half_width_m;
    return box;
}

GeocodingClient::GeocodingClient(std::shared_ptr<http::Transport> transport, std::string endpoint)
    : transport_(std::move(transport)), endpoint_(std::move(endpoint)) {
    if (!transport_) {
        throw Error(Errc::InvalidArgument, "geocoding client needs a transport");
    }
}

std::string GeocodingClient::search(std::string_view name) const {
    http::Request req;
    req.method = "GET";
    const char sep = endpoint_.find('?') == std::string::npos ? '?' : '&';
    req.url = endpoint_ + sep + "q=" + http::url_encode(name) + "&format=json&limit=1";
    req.headers.emplace("User-Agent", std::string(kUserAgent));
    req.headers.emplace("Accept", "application/json");

    http::Response resp;
    try {
        resp = transport_->send(req);
    } catch (const Error& e) {
        throw Error(Errc::ServiceUnreachable, e.message(), "geocode");
    }
    if (resp.status < 200 || resp.status >= 300) {
        throw Error(Errc::ServiceUnreachable,
                    "geocoding service answered HTTP " + std::to_string(resp.status), "geocode");
    }
    return resp.body;
}

namespace {

double coordinate_field(const json& item, const char* key) {
    if (!item.contains(key)) {
        throw Error(Errc::MalformedResponse, std::string("result has no '") + key + "'", "geocode");
    }
    const json& v = item.at(key);
    if (v.is_number()) {
        return v.get<double>();
    }
    if (!v.is_string()) {
        throw Error(Errc::MalformedResponse, std::string("'") + key + "' is not a decimal", "geocode");
    }
    const auto& s = v.get_ref<const std::string&>();
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw Error(Errc::MalformedResponse, std::string("'") + key + "' is not a decimal: " + s,
                    "geocode");
    }
    return out;
}

}  // namespace

GeoPoint parse_search_response(std::string_view body) {
    const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_array()) {
        throw Error(Errc::MalformedResponse, "expected a JSON array of results", "geocode");
    }
    if (doc.empty()) {
        throw Error(Errc::NoMatch, "no results", "geocode");
    }
    const json& first = doc.front();
    if (!first.is_object()) {
        throw Error(Errc::MalformedResponse, "result is not an object", "geocode");
    }
    const double lat = coordinate_field(first, "lat");
    const double lon = coordinate_field(first, "lon");
    try {
        return GeoPoint::make(lat, lon);
    } catch (const Error& e) {
        throw Error(Errc::MalformedResponse, e.message(), "geocode");
    }
}

GeoPoint geocode(std::string_view name, const GeocodingClient& client) {
    const auto first = name.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        throw Error(Errc::NoMatch, "empty location name", "geocode");
    }
    const auto last = name.find_last_not_of(" \t\r\n");
    const auto trimmed = name.substr(first, last - first + 1);
    try {
        return parse_search_response(client.search(trimmed));
    } catch (const Error& e) {
        if (e.code() == Errc::NoMatch) {
            throw Error(Errc::NoMatch, "no match for '" + std::string(trimmed) + "'", "geocode");
        }
        throw;
    }
}

}  // namespace ecoscapes::geo
