#pragma once

#include "ecoscapes/analysis.hpp"
#include "ecoscapes/raster.hpp"
#include "ecoscapes/satellite.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ecoscapes::config {

using Env = std::map<std::string, std::string>;

// Snapshot of the process environment.
Env process_env();

enum class BackendKind { Stub, Remote };

struct BackendConfig {
    BackendKind kind = BackendKind::Stub;
    std::string url;
    // "env:NAME" reads NAME from the environment, anything else is literal,
    // empty means no token.
    std::string token_source;
    std::optional<std::string> token;  // resolved, never serialized
    double temperature = 0.0;
    std::optional<int> max_tokens;
    int max_retries = 3;
};

struct ModelConfig {
    std::string rgb_model = "360vl";
    std::string water_model = "360vl";
    std::string moisture_model = "360vl";
    std::string report_model = "internlm2";
};

struct Config {
    std::string geocoder_url = std::string(geo::GeocodingClient::kDefaultUrl);
    std::string satellite_api_url;
    std::string api_token_source = "env:ECOSCAPES_API_TOKEN";
    std::optional<std::string> api_token;  // resolved
    BackendConfig backend;
    ModelConfig models;
    double bbox_side_m = 5000.0;
    double max_cloud = 0.01;
    raster::WaterMaskParams water;
    int max_side = 1024;
    double true_color_gain = 2.5;
    bool invert_water = false;
    std::optional<satellite::Date> today;
    std::filesystem::path output_dir = "output";
    std::filesystem::path manual_root = "satellite_data";
    std::filesystem::path corpus_dir;  // defaults to the installed prompt corpus

    satellite::AcquisitionConfig acquisition() const;
    analysis::StageModels stage_models() const;
};

std::filesystem::path default_corpus_dir();

/// JSON text to Config. An empty or all-whitespace text gives the defaults.
/// Throws UnknownKey, OutOfRangeValue, MissingToken (remote backend whose
/// token source resolves to nothing) or InvalidArgument for malformed JSON.
Config parse_config(std::string_view text, const Env& env);
Config load_config(const std::filesystem::path& path, const Env& env);

/// Every field, token sources rather than resolved tokens.
std::string serialize(const Config& config);

}  // namespace ecoscapes::config
