#include "ecoscapes/config.hpp"

#include "ecoscapes/error.hpp"
#include "ecoscapes/image.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

extern char** environ;

namespace ecoscapes::config {

using nlohmann::json;

#ifndef ECOSCAPES_DATA_DIR
#define ECOSCAPES_DATA_DIR "data"
#endif

Env process_env() {
    Env env;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        std::string_view entry(*e);
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        env.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
    }
    return env;
}

std::filesystem::path default_corpus_dir() {
    return std::filesystem::path(ECOSCAPES_DATA_DIR) / "prompts";
}

satellite::AcquisitionConfig Config::acquisition() const {
    satellite::AcquisitionConfig a;
    a.manual_root = manual_root;
    a.invert_manual_water = invert_water;
    a.geocoder_url = geocoder_url;
    a.satellite_api_url = satellite_api_url;
    a.api_token = api_token;
    a.bbox_side_m = bbox_side_m;
    a.max_cloud = max_cloud;
    a.today = today;
    a.max_side = max_side;
    a.true_color_gain = true_color_gain;
    return a;
}

analysis::StageModels Config::stage_models() const {
    llm::DecodingParams p{backend.temperature, backend.max_tokens};
    return {{models.rgb_model, p}, {models.water_model, p}, {models.moisture_model, p},
            {models.report_model, p}};
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) {
        throw Error(Errc::InvalidArgument, where.empty() ? "config must be a JSON object"
                                                         : where + " must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (known.count(key) == 0) {
            throw Error(Errc::UnknownKey, "unknown config key '" + where + key + "'");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::InvalidArgument, "config key '" + where + key + "' has the wrong type");
    }
}

void read_path(const json& obj, const char* key, const std::string& where,
               std::filesystem::path& out) {
    std::string s = out.string();
    read(obj, key, where, s);
    out = s;
}

void check(bool ok, const std::string& key, const std::string& range) {
    if (!ok) throw Error(Errc::OutOfRangeValue, key + " must be " + range);
}

void require_text(const std::string& value, const std::string& key) {
    check(!value.empty(), key, "non-empty");
}

std::optional<std::string> resolve_token(const std::string& source, const Env& env) {
    if (source.empty()) return std::nullopt;
    if (source.rfind("env:", 0) == 0) {
        auto it = env.find(source.substr(4));
        if (it == env.end() || it->second.empty()) return std::nullopt;
        return it->second;
    }
    return source;
}

}  // namespace

Config parse_config(std::string_view text, const Env& env) {
    Config c;
    c.corpus_dir = default_corpus_dir();

    const bool blank = std::all_of(text.begin(), text.end(),
                                   [](unsigned char ch) { return std::isspace(ch) != 0; });
    json root = json::object();
    if (!blank) {
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(Errc::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
        }
    }

    reject_unknown(root,
                   {"geocoder_url", "satellite_api_url", "api_token", "backend", "models",
                    "bbox_side_m", "max_cloud", "water", "max_side", "true_color_gain",
                    "invert_water", "today", "output_dir", "manual_root", "corpus_dir"},
                   "");
    read(root, "geocoder_url", "", c.geocoder_url);
    read(root, "satellite_api_url", "", c.satellite_api_url);
    read(root, "api_token", "", c.api_token_source);
    read(root, "bbox_side_m", "", c.bbox_side_m);
    read(root, "max_cloud", "", c.max_cloud);
    read(root, "max_side", "", c.max_side);
    read(root, "true_color_gain", "", c.true_color_gain);
    read(root, "invert_water", "", c.invert_water);
    read_path(root, "output_dir", "", c.output_dir);
    read_path(root, "manual_root", "", c.manual_root);
    read_path(root, "corpus_dir", "", c.corpus_dir);
    if (auto it = root.find("today"); it != root.end() && !it->is_null()) {
        std::string day;
        read(root, "today", "", day);
        try {
            c.today = satellite::parse_iso_date(day);
        } catch (const Error&) {
            throw Error(Errc::OutOfRangeValue, "today must be a YYYY-MM-DD date");
        }
    }

    if (auto it = root.find("backend"); it != root.end()) {
        const std::string w = "backend.";
        reject_unknown(*it, {"kind", "url", "token", "temperature", "max_tokens", "max_retries"},
                       w);
        std::string kind = "stub";
        read(*it, "kind", w, kind);
        if (kind == "stub") {
            c.backend.kind = BackendKind::Stub;
        } else if (kind == "remote") {
            c.backend.kind = BackendKind::Remote;
        } else {
            throw Error(Errc::OutOfRangeValue, "backend.kind must be 'stub' or 'remote'");
        }
        read(*it, "url", w, c.backend.url);
        read(*it, "token", w, c.backend.token_source);
        read(*it, "temperature", w, c.backend.temperature);
        read(*it, "max_retries", w, c.backend.max_retries);
        if (auto mt = it->find("max_tokens"); mt != it->end() && !mt->is_null()) {
            int v = 0;
            read(*it, "max_tokens", w, v);
            c.backend.max_tokens = v;
        }
    }

    if (auto it = root.find("models"); it != root.end()) {
        const std::string w = "models.";
        reject_unknown(*it, {"rgb_model", "water_model", "moisture_model", "report_model"}, w);
        read(*it, "rgb_model", w, c.models.rgb_model);
        read(*it, "water_model", w, c.models.water_model);
        read(*it, "moisture_model", w, c.models.moisture_model);
        read(*it, "report_model", w, c.models.report_model);
    }

    if (auto it = root.find("water"); it != root.end()) {
        const std::string w = "water.";
        reject_unknown(
            *it, {"threshold", "opening_radius", "min_area_fraction", "significance_cutoff"}, w);
        read(*it, "threshold", w, c.water.threshold);
        read(*it, "opening_radius", w, c.water.opening_radius);
        read(*it, "min_area_fraction", w, c.water.min_area_fraction);
        read(*it, "significance_cutoff", w, c.water.significance_cutoff);
    }

    const auto finite = [](double v) { return std::isfinite(v); };
    check(finite(c.bbox_side_m) && c.bbox_side_m > 0 && c.bbox_side_m <= 200000, "bbox_side_m",
          "in (0, 200000]");
    check(finite(c.max_cloud) && c.max_cloud > 0 && c.max_cloud <= 1, "max_cloud", "in (0, 1]");
    check(c.max_side >= 1 && c.max_side <= 16384, "max_side", "in [1, 16384]");
    check(finite(c.true_color_gain) && c.true_color_gain > 0 && c.true_color_gain <= 100,
          "true_color_gain", "in (0, 100]");
    check(c.water.threshold >= 0 && c.water.threshold <= 255, "water.threshold", "in [0, 255]");
    check(c.water.opening_radius >= 0 && c.water.opening_radius <= 64, "water.opening_radius",
          "in [0, 64]");
    check(finite(c.water.min_area_fraction) && c.water.min_area_fraction >= 0 &&
              c.water.min_area_fraction < 1,
          "water.min_area_fraction", "in [0, 1)");
    check(finite(c.water.significance_cutoff) && c.water.significance_cutoff >= 0 &&
              c.water.significance_cutoff <= 1,
          "water.significance_cutoff", "in [0, 1]");
    check(finite(c.backend.temperature) && c.backend.temperature >= 0 &&
              c.backend.temperature <= 2,
          "backend.temperature", "in [0, 2]");
    check(c.backend.max_retries >= 0 && c.backend.max_retries <= 10, "backend.max_retries",
          "in [0, 10]");
    check(!c.backend.max_tokens || *c.backend.max_tokens >= 1, "backend.max_tokens", ">= 1");
    require_text(c.geocoder_url, "geocoder_url");
    require_text(c.models.rgb_model, "models.rgb_model");
    require_text(c.models.water_model, "models.water_model");
    require_text(c.models.moisture_model, "models.moisture_model");
    require_text(c.models.report_model, "models.report_model");
    require_text(c.output_dir.string(), "output_dir");
    require_text(c.manual_root.string(), "manual_root");
    require_text(c.corpus_dir.string(), "corpus_dir");

    c.api_token = resolve_token(c.api_token_source, env);
    c.backend.token = resolve_token(c.backend.token_source, env);
    if (c.backend.kind == BackendKind::Remote) {
        require_text(c.backend.url, "backend.url");
        if (!c.backend.token_source.empty() && !c.backend.token) {
            throw Error(Errc::MissingToken,
                        "backend.token '" + c.backend.token_source + "' resolves to nothing");
        }
    }
    return c;
}

Config load_config(const std::filesystem::path& path, const Env& env) {
    const auto bytes = read_file_bytes(path);
    return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                        env);
}

std::string serialize(const Config& c) {
    json backend = {{"kind", c.backend.kind == BackendKind::Stub ? "stub" : "remote"},
                    {"url", c.backend.url},
                    {"token", c.backend.token_source},
                    {"temperature", c.backend.temperature},
                    {"max_retries", c.backend.max_retries}};
    backend["max_tokens"] = c.backend.max_tokens ? json(*c.backend.max_tokens) : json(nullptr);
    json root = {
        {"geocoder_url", c.geocoder_url},
        {"satellite_api_url", c.satellite_api_url},
        {"api_token", c.api_token_source},
        {"backend", backend},
        {"models",
         {{"rgb_model", c.models.rgb_model},
          {"water_model", c.models.water_model},
          {"moisture_model", c.models.moisture_model},
          {"report_model", c.models.report_model}}},
        {"bbox_side_m", c.bbox_side_m},
        {"max_cloud", c.max_cloud},
        {"water",
         {{"threshold", c.water.threshold},
          {"opening_radius", c.water.opening_radius},
          {"min_area_fraction", c.water.min_area_fraction},
          {"significance_cutoff", c.water.significance_cutoff}}},
        {"max_side", c.max_side},
        {"true_color_gain", c.true_color_gain},
        {"invert_water", c.invert_water},
        {"today", c.today ? json(satellite::format_iso_date(*c.today)) : json(nullptr)},
        {"output_dir", c.output_dir.string()},
        {"manual_root", c.manual_root.string()},
        {"corpus_dir", c.corpus_dir.string()},
    };
    return root.dump(2) + "\n";
}

}  // namespace ecoscapes::config
