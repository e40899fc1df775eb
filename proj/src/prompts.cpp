#include "ecoscapes/prompts.hpp"

#include "ecoscapes/digest.hpp"
#include "ecoscapes/error.hpp"
#include "ecoscapes/image.hpp"

#include <json.hpp>

#include <array>
#include <span>
#include <string_view>

namespace ecoscapes::analysis {

namespace {

using nlohmann::json;

// SHA-256 of each prompt text, in table order.
constexpr std::array<std::string_view, 14> kRgbPins = {
    "dbb431dab009b3072f42ab7e07bb0a19e82654be3ba8be25b04a6d7d4a70f42d",
    "4c546c37afdd259305e78413910de0abd2c11395da2423bece5402b077a603ad",
    "979f83c01ada5a1ea36836f0b56f445590cf3c4cde85fea70fe62a329607efbd",
    "8427e998423c1f93090762d521e6030a01f12ce5471d9e677916621310d3f793",
    "05e0f0c2172abfdaf2bf78ecf784557bde8d4a841f3393e844fe60dcdd0ec00c",
    "e473234209a99797fa01283b06d8195095a8ca6f01362c8d8ab3ba41407d26c2",
    "18f8e1ae783d11205d8fee4f7ea01482a1187dc6902bb86281565a599bf62c4e",
    "deec4552f541512f4d2d8fdfcb9778a9034a22c072aa1b077fc4790a323e7062",
    "a4903c3fd8dc95a5b73881e3db12c043ac3bada23ba31e7fa617c0a5b1ce0f27",
    "36d90515a943e8db8cc4f0fca864e8df4345b0ad5814fcf17f532b8c80c739a9",
    "dce32d4eb0f7ae20b1c2ea85c30770f3c8fcfcdbee2dc14e93e7578a1f556c99",
    "8d91efc25dbc3cb0de9ea18df97e0143fbca7a4c059677d9549e0237382b66e2",
    "b0863da52a1720c57ace51f255c3a63527725a80d26a04b952faaab28ac073ac",
    "832c487dbe61e82a45e6b4915084548f35e63c4d67948c31c2efdba44def848e",
};

constexpr std::array<std::string_view, 7> kMoisturePins = {
    "b31d8a14d6046b497e69263c9b11df7a7dcf5e22c8345a49522802970d3a091e",
    "741c39294d386dc81c22f3aaaea36834565bd0121e7b2d846b9745b12cebeb42",
    "8bcec8bb6639474e891b928cfd5c9370ba5066661282fdafee8c613a87050a87",
    "563e347c0670176507a0b72793c6fd44c16e24250a98aec8050619c00ddad8ac",
    "076546b49d299ebc64d92667b9c4c4b6b6a05fe65469789926162ef4d9e93b1c",
    "6774ed7316f158e53091593a669e96fd2bb744aca9616102f9ab76f14c1993d9",
    "57beb546d8614fd1d383311ddcdf5dca110c2e96eaa247ab8b8c4f97e6e99913",
};

constexpr std::array<std::string_view, 1> kWaterSystemPins = {
    "f863b97e1b3cd524fa9dce564bb6079c56d9da8f9affeefa6841b458576b22c4",
};

constexpr std::array<std::string_view, 3> kWaterUserPins = {
    "9e33ee404e3f84bfae1e06f989cad98779f51dc5c35a8c2ecc4d21324e4e41e2",
    "9a8fdd226aabc51be763044150664de02764d00687f2145155c65263189bb108",
    "9967cf7976449d313fa0b39a7e168d6465907bb2e8bd7cc0c7610174510193ed",
};

constexpr std::array<std::string_view, 1> kReportSystemPins = {
    "a3cf4ec6186c64c931a77ba4daa595003c456224bdaa52537127e8aeb1c3c178",
};

constexpr std::array<std::string_view, 2> kReportUserPins = {
    "a5dfe859bb16a184c4fd3ae9f0b65cc59da919f7f8e6ec05d7e4a69e1de26c74",
    "615ebc8d7688c1cb22a7aa897e20f00f1f032ba881748bc7de8349d15dec1752",
};

constexpr std::array<std::string_view, 1> kModificationPins = {
    "1a5b6af2beab42141b4706abef8fdb195ee4d4fd06996badb44581c07181a492",
};
json load_json_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(Errc::MissingCorpus, path.string() + " not found", "load_prompt_corpus");
    }
    const auto bytes = read_file_bytes(path);
    json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::MissingCorpus, path.string() + " is not a JSON object", "load_prompt_corpus");
    }
    return doc;
}

std::vector<std::string> string_list(const json& doc, const char* key, const std::string& file) {
    if (!doc.contains(key) || !doc[key].is_array()) {
        throw Error(Errc::MissingCorpus, file + " has no '" + key + "' list", "load_prompt_corpus");
    }
    std::vector<std::string> out;
    for (const auto& v : doc[key]) {
        if (!v.is_string()) {
            throw Error(Errc::MissingCorpus, file + " '" + key + "' holds a non-string",
                        "load_prompt_corpus");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string string_field(const json& doc, const char* key, const std::string& file) {
    if (!doc.contains(key) || !doc[key].is_string()) {
        throw Error(Errc::MissingCorpus, file + " has no '" + key + "' string", "load_prompt_corpus");
    }
    return doc[key].get<std::string>();
}

void verify(const std::vector<std::string>& texts, std::span<const std::string_view> pins,
            const std::string& what) {
    if (texts.size() != pins.size()) {
        throw Error(Errc::ChecksumMismatch,
                    what + " has " + std::to_string(texts.size()) + " prompts, expected " +
                        std::to_string(pins.size()),
                    "load_prompt_corpus");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (sha256_hex(texts[i]) != pins[i]) {
            throw Error(Errc::ChecksumMismatch, what + " prompt " + std::to_string(i + 1) + " was altered",
                        "load_prompt_corpus");
        }
    }
}

}  // namespace

PromptCorpus load_prompt_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(Errc::MissingCorpus, dir.string() + " is not a directory", "load_prompt_corpus");
    }
    const json manifest = load_json_file(dir / "manifest.json");
    if (!manifest.contains("files") || !manifest["files"].is_object()) {
        throw Error(Errc::MissingCorpus, "manifest.json lists no files", "load_prompt_corpus");
    }
    for (const char* name : kCorpusFiles) {
        const auto path = dir / name;
        if (!std::filesystem::is_regular_file(path)) {
            throw Error(Errc::MissingCorpus, path.string() + " not found", "load_prompt_corpus");
        }
        const auto& files = manifest["files"];
        if (!files.contains(name) || !files[name].is_string()) {
            throw Error(Errc::ChecksumMismatch, std::string("manifest.json has no entry for ") + name,
                        "load_prompt_corpus");
        }
        if (sha256_hex(read_file_bytes(path)) != files[name].get<std::string>()) {
            throw Error(Errc::ChecksumMismatch, std::string(name) + " does not match manifest.json",
                        "load_prompt_corpus");
        }
    }

    PromptCorpus c;
    const json rgb = load_json_file(dir / "rgb_analysis.json");
    c.rgb_prompts = string_list(rgb, "prompts", "rgb_analysis.json");
    verify(c.rgb_prompts, kRgbPins, "rgb_analysis");

    const json moisture = load_json_file(dir / "moisture_analysis.json");
    c.moisture_prompts = string_list(moisture, "prompts", "moisture_analysis.json");
    verify(c.moisture_prompts, kMoisturePins, "moisture_analysis");

    const json water = load_json_file(dir / "water_analysis.json");
    c.water_system = string_field(water, "system", "water_analysis.json");
    verify({c.water_system}, kWaterSystemPins, "water_analysis system");
    c.water_user_prompts = string_list(water, "prompts", "water_analysis.json");
    verify(c.water_user_prompts, kWaterUserPins, "water_analysis");

    const json report = load_json_file(dir / "climate_report.json");
    c.report_system = string_field(report, "system", "climate_report.json");
    verify({c.report_system}, kReportSystemPins, "climate_report system");
    c.report_user_templates = string_list(report, "prompts", "climate_report.json");
    verify(c.report_user_templates, kReportUserPins, "climate_report");

    const json mod = load_json_file(dir / "water_rgb_modification.json");
    const auto mod_prompts = string_list(mod, "prompts", "water_rgb_modification.json");
    verify(mod_prompts, kModificationPins, "water_rgb_modification");
    c.modification_template = mod_prompts.front();
    return c;
}

std::string fill_template(const std::string& templ, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(templ.size());
    std::size_t pos = 0;
    while (pos < templ.size()) {
        const auto open = templ.find('{', pos);
        if (open == std::string::npos) {
            out.append(templ, pos, std::string::npos);
            break;
        }
        const auto close = templ.find('}', open);
        const bool is_name =
            close != std::string::npos &&
            templ.find_first_not_of("abcdefghijklmnopqrstuvwxyz_", open + 1) == close && close > open + 1;
        out.append(templ, pos, open - pos);
        if (!is_name) {
            out.push_back('{');
            pos = open + 1;
            continue;
        }
        const auto name = templ.substr(open + 1, close - open - 1);
        auto it = values.find(name);
        if (it == values.end() || it->second.empty()) {
            throw Error(Errc::MissingPlaceholderInput, "no value for {" + name + "}");
        }
        out += it->second;
        pos = close + 1;
    }
    return out;
}

}  // namespace ecoscapes::analysis
