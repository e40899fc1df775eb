#include "ecoscapes/cli.hpp"

#include "ecoscapes/analysis.hpp"
#include "ecoscapes/error.hpp"
#include "ecoscapes/image.hpp"
#include "ecoscapes/prompts.hpp"
#include "ecoscapes/satellite.hpp"

#include <json.hpp>

#include <algorithm>
#include <ctime>
#include <ostream>

namespace ecoscapes::cli {

using nlohmann::json;
using pipeline::Status;

int exit_code_for(const pipeline::RunReport& report) {
    bool all_ok = !report.statuses.empty();
    for (const auto& [id, st] : report.statuses) {
        if (st.status != Status::Succeeded) all_ok = false;
    }
    if (all_ok) return 0;
    return report.status_of(analysis::kClimateReport) == Status::Succeeded ? 2 : 1;
}

namespace {

std::string safe_component(const std::string& location) {
    std::string out;
    for (char c : location) {
        out += (c == '/' || c == '\\' || c == ':' || static_cast<unsigned char>(c) < 0x20) ? '_' : c;
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

std::string utc_stamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
    return buf;
}

}  // namespace

std::filesystem::path choose_output_dir(const std::filesystem::path& base,
                                        const std::string& location,
                                        std::chrono::system_clock::time_point now) {
    const auto dir = base / safe_component(location);
    if (!std::filesystem::exists(dir)) return dir;
    const std::string stem = "run-" + utc_stamp(now);
    auto candidate = dir / stem;
    for (int n = 2; std::filesystem::exists(candidate); ++n) {
        candidate = dir / (stem + "-" + std::to_string(n));
    }
    return candidate;
}

RunOutcome run(const std::string& location, const config::Config& config, const Services& services,
               std::ostream& out, std::ostream& err) {
    RunOutcome outcome;
    auto transport = services.transport ? services.transport
                                        : std::make_shared<http::HttplibTransport>();

    analysis::PipelineSettings settings;
    settings.location = location;
    settings.models = config.stage_models();
    settings.water = config.water;
    try {
        settings.corpus = analysis::load_prompt_corpus(config.corpus_dir);
    } catch (const Error& e) {
        err << "error: stage corpus: " << e.what() << "\n";
        return outcome;
    }
    if (services.backend) {
        settings.backend = services.backend;
    } else if (config.backend.kind == config::BackendKind::Stub) {
        settings.backend = std::make_shared<llm::StubBackend>();
    } else {
        llm::RemoteChatBackend::Options opts;
        opts.url = config.backend.url;
        opts.token = config.backend.token;
        opts.max_retries = config.backend.max_retries;
        settings.backend = std::make_shared<llm::RemoteChatBackend>(transport, opts);
    }
    const auto acquisition = config.acquisition();
    settings.load_images = [location, acquisition, transport] {
        return satellite::acquire(location, acquisition, transport);
    };

    pipeline::Plan plan;
    try {
        plan = pipeline::resolve_order(analysis::build_modules(settings));
    } catch (const Error& e) {
        err << "error: stage pipeline: " << e.what() << "\n";
        return outcome;
    }

    pipeline::ArtifactStore store;
    auto report = pipeline::execute(plan, store);

    const auto now = services.now ? services.now() : std::chrono::system_clock::now();
    outcome.output_dir = choose_output_dir(config.output_dir, location, now);
    try {
        store.mirror_to(outcome.output_dir);
        const auto report_json = report.to_json();
        write_file_bytes(outcome.output_dir / "run_report.json",
                         std::span(reinterpret_cast<const std::uint8_t*>(report_json.data()),
                                   report_json.size()));
    } catch (const std::exception& e) {
        err << "error: stage output: " << e.what() << "\n";
        outcome.report = std::move(report);
        return outcome;
    }

    for (const auto& id : plan.ids()) {
        const auto& st = report.statuses.at(id);
        if (st.status == Status::Failed) {
            err << "error: stage " << id << " failed: " << st.detail << "\n";
        } else if (st.status == Status::Skipped) {
            err << "warning: stage " << id << " skipped, " << st.detail << " did not succeed\n";
        }
    }
    outcome.exit_code = exit_code_for(report);
    outcome.report = std::move(report);
    out << outcome.output_dir.string() << "\n";
    return outcome;
}

int cmd_run(const std::string& location, const config::Config& config, const Services& services,
            std::ostream& out, std::ostream& err) {
    return run(location, config, services, out, err).exit_code;
}

std::map<raster::BandId, raster::BandRaster> read_band_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(Errc::Io, dir.string() + " is not a directory");
    }
    std::vector<std::filesystem::path> sidecars;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            sidecars.push_back(entry.path());
        }
    }
    std::sort(sidecars.begin(), sidecars.end());

    std::map<raster::BandId, raster::BandRaster> bands;
    for (const auto& sidecar : sidecars) {
        const auto bytes = read_file_bytes(sidecar);
        json meta;
        try {
            meta = json::parse(bytes.begin(), bytes.end());
        } catch (const json::parse_error& e) {
            throw Error(Errc::InvalidArgument, sidecar.filename().string() + ": " + e.what());
        }
        if (!meta.is_object() || !meta.contains("band") || !meta["band"].is_string()) {
            throw Error(Errc::InvalidArgument, sidecar.filename().string() + " names no band");
        }
        const auto id = raster::parse_band(meta["band"].get<std::string>());
        if (!id) {
            throw Error(Errc::InvalidArgument,
                        sidecar.filename().string() + ": unknown band " + meta["band"].dump());
        }
        if (bands.count(*id) != 0) {
            throw Error(Errc::InvalidArgument, "band " + std::string(raster::band_code(*id)) +
                                                   " is described twice");
        }
        const auto file = dir / meta.value("file", sidecar.stem().string() + ".png");
        const auto gray = read_png_gray(file);
        const double full = gray.bit_depth == 16 ? 65535.0 : (1 << gray.bit_depth) - 1.0;
        const double scale = meta.value("scale", 1.0 / full);
        std::optional<int> nodata;
        if (meta.contains("nodata") && !meta["nodata"].is_null()) nodata = meta["nodata"].get<int>();

        raster::BandRaster r;
        r.band = *id;
        r.width = gray.width;
        r.height = gray.height;
        r.values.resize(gray.samples.size());
        r.data_mask.resize(gray.samples.size());
        for (std::size_t i = 0; i < gray.samples.size(); ++i) {
            const bool valid = !nodata || gray.samples[i] != *nodata;
            r.values[i] = valid ? gray.samples[i] * scale : 0.0;
            r.data_mask[i] = valid ? 1 : 0;
        }
        r.validate();
        bands.emplace(*id, std::move(r));
    }
    return bands;
}

int cmd_indices(const std::filesystem::path& bands_dir, const std::filesystem::path& out_dir,
                const config::Config& config, bool invert_water, std::ostream& out,
                std::ostream& err) {
    try {
        const auto bands = read_band_dir(bands_dir);
        for (auto id : raster::kAllBands) {
            if (bands.count(id) == 0) {
                err << "error: missing band " << raster::band_code(id) << " in " << bands_dir.string()
                    << "\n";
                return 1;
            }
        }
        satellite::RenderOptions opts;
        opts.true_color_gain = config.true_color_gain;
        opts.max_side = config.max_side;
        opts.water_polarity =
            invert_water ? raster::WaterPolarity::BrowserRamp : raster::WaterPolarity::WaterWhite;
        const auto images = satellite::render_image_set(bands, "", opts);
        satellite::write_image_set(images, out_dir);
        for (const char* name : satellite::kImageFileNames) {
            out << (out_dir / name).string() << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_score_add(const std::filesystem::path& store_path, const evaluation::ScoreRecord& record,
                  std::ostream& out, std::ostream& err) {
    try {
        auto store = evaluation::ScoreStore::open(store_path);
        store.record(record);
        out << "recorded " << record.location << " " << evaluation::system_name(record.system) << " "
            << evaluation::criterion_name(record.criterion) << " run " << record.run_index << " = "
            << record.value << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_score_summary(const std::filesystem::path& store_path, const std::string& location,
                      evaluation::Criterion criterion,
                      const std::optional<std::vector<evaluation::System>>& systems,
                      const std::optional<std::filesystem::path>& json_out, std::ostream& out,
                      std::ostream& err) {
    try {
        const auto store = evaluation::ScoreStore::open(store_path);
        const auto rows = evaluation::compare_systems(store, location, criterion, systems);
        out << evaluation::format_comparison(location, criterion, rows);
        if (json_out) {
            json doc = {{"location", location},
                        {"criterion", evaluation::criterion_name(criterion)},
                        {"systems", json::array()}};
            for (const auto& r : rows) {
                doc["systems"].push_back({{"system", evaluation::system_name(r.system)},
                                          {"n", r.count},
                                          {"min", r.summary.min},
                                          {"q1", r.summary.q1},
                                          {"median", r.summary.median},
                                          {"q3", r.summary.q3},
                                          {"max", r.summary.max}});
            }
            const auto text = doc.dump(2) + "\n";
            write_file_bytes(*json_out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                  text.size()));
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_validate_manual(const std::string& location, const config::Config& config,
                        std::ostream& out, std::ostream& err) {
    const auto dir = config.manual_root / location;
    const auto missing = satellite::missing_manual_files(config.manual_root, location);
    if (!missing) {
        err << "error: " << dir.string() << " does not exist\n";
        return 1;
    }
    if (!missing->empty()) {
        err << "error: " << dir.string() << " lacks";
        for (const auto& m : *missing) err << " " << m;
        err << "\n";
        return 1;
    }
    try {
        const auto set = satellite::load_manual_images(config.manual_root, location,
                                                       {config.max_side, config.invert_water});
        out << dir.string() << ": rgb " << set->rgb.width << "x" << set->rgb.height << ", moisture "
            << set->moisture.width << "x" << set->moisture.height << ", water " << set->water.width
            << "x" << set->water.height << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ecoscapes::cli
