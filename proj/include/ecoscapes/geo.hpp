#pragma once

#include "ecoscapes/http.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace ecoscapes::geo {

/// Meters per degree of latitude on the spherical-earth approximation.
inline constexpr double kMetersPerDegree = 111320.0;

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    // Throws InvalidArgument outside [-90,90] x [-180,180].
    static GeoPoint make(double lat, double lon);
    bool operator==(const GeoPoint&) const = default;
};

struct GeoBoundingBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;
    GeoPoint center;
    double half_width_m = 0.0;

    bool contains(const GeoPoint& p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
    double lat_span() const { return max_lat - min_lat; }
    double lon_span() const { return max_lon - min_lon; }
};

/// Square box extending `half_width_m` north, south, east and west of
/// `center`. Rejects non-positive widths and |lat| >= 89 (PolarRegion).
GeoBoundingBox bounding_box(const GeoPoint& center, double half_width_m);

/// Client for a Nominatim-compatible free-text search endpoint.
class GeocodingClient {
public:
    static constexpr std::string_view kDefaultUrl = "https://nominatim.openstreetmap.org/search";
    static constexpr std::string_view kUserAgent =
        "ecoscapes/0.1 (batch climate-adaptation report pipeline)";

    GeocodingClient(std::shared_ptr<http::Transport> transport,
                    std::string endpoint = std::string(kDefaultUrl));

    /// Raw response body for `name`. Throws ServiceUnreachable on transport
    /// failure or a non-2xx status.
    std::string search(std::string_view name) const;

    const std::string& endpoint() const { return endpoint_; }

private:
    std::shared_ptr<http::Transport> transport_;
    std::string endpoint_;
};

/// Coordinates of the first match in a search response body.
/// Throws NoMatch for an empty result list, MalformedResponse otherwise.
GeoPoint parse_search_response(std::string_view body);

/// Resolves `name` through `client`. An empty or all-whitespace name is
/// rejected with NoMatch before any request is made.
GeoPoint geocode(std::string_view name, const GeocodingClient& client);

}  // namespace ecoscapes::geo
