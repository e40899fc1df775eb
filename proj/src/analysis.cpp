#include "ecoscapes/analysis.hpp"

#include "ecoscapes/error.hpp"

#include <cstdio>

namespace ecoscapes::analysis {

namespace {

llm::Attachment attach(const Image& image) {
    return llm::Attachment{"image/png", encode_png(image)};
}

void require_image(const Image& image, const char* stage) {
    if (image.empty()) {
        throw Error(Errc::InvalidArgument, "input image is empty", stage);
    }
}

// Sends `prompt` in a fresh single-turn session. Errors name the 1-based
// prompt index.
std::string single_turn(const std::shared_ptr<llm::ChatBackend>& backend,
                        const std::optional<std::string>& system, const StageModel& model,
                        const std::string& prompt, const llm::Attachment& image, std::size_t index,
                        const char* stage) {
    try {
        auto session = llm::open_session(backend, system, model.model, model.params);
        return session.send(prompt, {image});
    } catch (const Error& e) {
        throw Error(e.code(), "prompt " + std::to_string(index) + ": " + e.message(), stage);
    }
}

AnalysisText independent_prompts(Stage stage, const char* stage_name, const Image& image,
                                 const std::vector<std::string>& prompts,
                                 const std::shared_ptr<llm::ChatBackend>& backend,
                                 const StageModel& model) {
    require_image(image, stage_name);
    const auto attachment = attach(image);
    AnalysisText out;
    out.stage = stage;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        out.sections.push_back(
            {prompts[i],
             single_turn(backend, std::nullopt, model, prompts[i], attachment, i + 1, stage_name)});
    }
    out.rendered = render_sections(out.sections);
    return out;
}

}  // namespace

std::string render_sections(const std::vector<Section>& sections) {
    std::string out;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (i > 0) out += "\n";
        out += "## Prompt " + std::to_string(i + 1) + "\n" + sections[i].reply + "\n";
    }
    return out;
}

AnalysisText run_rgb_analysis(const Image& rgb, const std::shared_ptr<llm::ChatBackend>& backend,
                              const PromptCorpus& corpus, const StageModel& model) {
    return independent_prompts(Stage::Rgb, kRgbAnalysis, rgb, corpus.rgb_prompts, backend, model);
}

AnalysisText run_moisture_analysis(const Image& moisture,
                                   const std::shared_ptr<llm::ChatBackend>& backend,
                                   const PromptCorpus& corpus, const StageModel& model) {
    return independent_prompts(Stage::Moisture, kMoistureAnalysis, moisture,
                               corpus.moisture_prompts, backend, model);
}

std::optional<AnalysisText> run_water_analysis(const Image& water_preprocessed,
                                               double water_fraction, double significance_cutoff,
                                               const std::shared_ptr<llm::ChatBackend>& backend,
                                               const PromptCorpus& corpus, const StageModel& model) {
    if (water_fraction < significance_cutoff) {
        return std::nullopt;
    }
    require_image(water_preprocessed, kWaterAnalysis);
    const auto attachment = attach(water_preprocessed);
    AnalysisText out;
    out.stage = Stage::Water;
    for (std::size_t i = 0; i < corpus.water_user_prompts.size(); ++i) {
        const auto& prompt = corpus.water_user_prompts[i];
        out.sections.push_back({prompt, single_turn(backend, corpus.water_system, model, prompt,
                                                    attachment, i + 1, kWaterAnalysis)});
    }
    out.rendered = render_sections(out.sections);
    return out;
}

AnalysisText apply_water_modification(const Image& rgb, const std::string& rgb_text,
                                      const std::string& water_text,
                                      const std::shared_ptr<llm::ChatBackend>& backend,
                                      const PromptCorpus& corpus, const StageModel& model) {
    require_image(rgb, kWaterRgbAnalysis);
    std::string prompt;
    try {
        prompt = fill_template(corpus.modification_template,
                               {{"water_analysis", water_text}, {"rgb_analysis", rgb_text}});
    } catch (const Error& e) {
        throw e.in_stage(kWaterRgbAnalysis);
    }
    AnalysisText out;
    out.stage = Stage::RgbModified;
    out.sections.push_back(
        {prompt, single_turn(backend, std::nullopt, model, prompt, attach(rgb), 1, kWaterRgbAnalysis)});
    out.rendered = out.sections.front().reply + "\n";
    return out;
}

AnalysisText generate_climate_report(const std::string& location, const std::string& rgb_text,
                                     const std::string& moisture_text,
                                     const std::shared_ptr<llm::ChatBackend>& backend,
                                     const PromptCorpus& corpus, const StageModel& model) {
    if (corpus.report_user_templates.size() != 2) {
        throw Error(Errc::InvalidArgument, "report needs exactly two user templates", kClimateReport);
    }
    std::string first;
    std::string second;
    try {
        first = fill_template(corpus.report_user_templates[0], {{"location", location}});
        second = fill_template(corpus.report_user_templates[1],
                               {{"rgb_analysis", rgb_text}, {"moisture_analysis", moisture_text}});
    } catch (const Error& e) {
        throw e.in_stage(kClimateReport);
    }
    AnalysisText out;
    out.stage = Stage::Report;
    try {
        auto session = llm::open_session(backend, corpus.report_system, model.model, model.params);
        out.sections.push_back({first, session.send(first)});
        out.sections.push_back({second, session.send(second)});
    } catch (const Error& e) {
        throw Error(e.code(),
                    "turn " + std::to_string(out.sections.size() + 1) + ": " + e.message(),
                    kClimateReport);
    }
    out.rendered = out.sections.back().reply + "\n";
    return out;
}

std::string assemble_downstream_prompt(const std::string& report, const std::string& location) {
    if (location.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(Errc::InvalidArgument, "location must not be empty", kDownstreamPrompt);
    }
    return "Develop a climate adaptation strategy for the city or town " + location +
           ". Use the following local climate report as context.\n\n" + report;
}

raster::BinaryMask preprocess_water(const Image& water, const raster::WaterMaskParams& params) {
    const auto mask = raster::threshold_mask(to_gray(water), params.threshold);
    return raster::denoise_mask(mask, params.opening_radius, params.min_area_fraction);
}

namespace {

using pipeline::ModuleContext;
using pipeline::ModuleResult;
using pipeline::ModuleSpec;

const Image& need_image(const ModuleContext& ctx, const char* name) {
    const Image* img = ctx.store().image(name);
    if (img == nullptr) {
        throw Error(Errc::InvalidArgument, std::string(name) + " is not available", ctx.module_id());
    }
    return *img;
}

const std::string& need_text(const ModuleContext& ctx, const char* name) {
    const std::string* text = ctx.store().text(name);
    if (text == nullptr) {
        throw Error(Errc::InvalidArgument, std::string(name) + " is not available", ctx.module_id());
    }
    return *text;
}

}  // namespace

std::vector<ModuleSpec> build_modules(const PipelineSettings& settings) {
    auto s = std::make_shared<const PipelineSettings>(settings);
    std::vector<ModuleSpec> mods;

    mods.push_back({kSatelliteLoader, {}, {}, {}, [s](const ModuleContext&) {
                        if (!s->load_images) {
                            throw Error(Errc::Configuration, "no image source", kSatelliteLoader);
                        }
                        satellite::ImageSet set = s->load_images();
                        ModuleResult r;
                        r.outputs.push_back({kRgbPng, std::move(set.rgb)});
                        r.outputs.push_back({kMoisturePng, std::move(set.moisture)});
                        r.outputs.push_back({kWaterPng, std::move(set.water)});
                        r.note = set.source == satellite::ImageSource::Manual ? "manual images"
                                                                               : "satellite API";
                        return r;
                    }});

    mods.push_back({kRgbAnalysis, {kSatelliteLoader}, {}, {}, [s](const ModuleContext& ctx) {
                        auto text = run_rgb_analysis(need_image(ctx, kRgbPng), s->backend, s->corpus,
                                                     s->models.rgb);
                        return ModuleResult{{{kRgbAnalysisTxt, std::move(text.rendered)}}, {}};
                    }});

    mods.push_back({kMoistureAnalysis, {kSatelliteLoader}, {}, {}, [s](const ModuleContext& ctx) {
                        auto text = run_moisture_analysis(need_image(ctx, kMoisturePng), s->backend,
                                                          s->corpus, s->models.moisture);
                        return ModuleResult{{{kMoistureAnalysisTxt, std::move(text.rendered)}}, {}};
                    }});

    mods.push_back({kWaterPreprocessing, {kSatelliteLoader}, {}, {}, [s](const ModuleContext& ctx) {
                        const auto mask = preprocess_water(need_image(ctx, kWaterPng), s->water);
                        char note[64];
                        std::snprintf(note, sizeof note, "water fraction %.6f",
                                      raster::water_fraction(mask));
                        return ModuleResult{{{kWaterPreprocessedPng, raster::mask_to_image(mask)}}, note};
                    }});

    mods.push_back({kWaterAnalysis, {kWaterPreprocessing}, {}, {}, [s](const ModuleContext& ctx) {
                        const Image& pre = need_image(ctx, kWaterPreprocessedPng);
                        const double fraction =
                            raster::water_fraction(raster::threshold_mask(pre, 128));
                        auto text = run_water_analysis(pre, fraction, s->water.significance_cutoff,
                                                       s->backend, s->corpus, s->models.water);
                        if (!text) {
                            return ModuleResult{{}, "no significant water bodies"};
                        }
                        return ModuleResult{{{kWaterAnalysisTxt, std::move(text->rendered)}}, {}};
                    }});

    mods.push_back({kWaterRgbAnalysis,
                    {kWaterAnalysis, kRgbAnalysis},
                    {},
                    {kRgbAnalysisTxt},
                    [s](const ModuleContext& ctx) {
                        const std::string* water = ctx.store().text(kWaterAnalysisTxt);
                        if (water == nullptr) {
                            return ModuleResult{{}, "no water findings; rgb analysis unchanged"};
                        }
                        auto text = apply_water_modification(need_image(ctx, kRgbPng),
                                                             need_text(ctx, kRgbAnalysisTxt), *water,
                                                             s->backend, s->corpus, s->models.water);
                        return ModuleResult{{{kRgbAnalysisTxt, std::move(text.rendered)}}, "revised"};
                    }});

    mods.push_back({kClimateReport,
                    {kRgbAnalysis, kMoistureAnalysis},
                    {kWaterRgbAnalysis},
                    {},
                    [s](const ModuleContext& ctx) {
                        auto text = generate_climate_report(
                            s->location, need_text(ctx, kRgbAnalysisTxt),
                            need_text(ctx, kMoistureAnalysisTxt), s->backend, s->corpus,
                            s->models.report);
                        std::string note;
                        if (!ctx.soft_available(kWaterRgbAnalysis)) {
                            note = "water revision unavailable";
                        }
                        return ModuleResult{{{kClimateReportTxt, std::move(text.rendered)}}, note};
                    }});

    mods.push_back({kDownstreamPrompt, {kClimateReport}, {}, {}, [s](const ModuleContext& ctx) {
                        return ModuleResult{
                            {{kDownstreamPromptTxt,
                              assemble_downstream_prompt(need_text(ctx, kClimateReportTxt),
                                                         s->location)}},
                            {}};
                    }});
    return mods;
}

}  // namespace ecoscapes::analysis
