#pragma once

#include "ecoscapes/image.hpp"
#include "ecoscapes/llm.hpp"
#include "ecoscapes/pipeline.hpp"
#include "ecoscapes/prompts.hpp"
#include "ecoscapes/raster.hpp"
#include "ecoscapes/satellite.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ecoscapes::analysis {

enum class Stage { Rgb, Moisture, Water, RgbModified, Report };

struct Section {
    std::string prompt;
    std::string reply;
};

struct AnalysisText {
    Stage stage = Stage::Rgb;
    std::vector<Section> sections;
    std::string rendered;
};

/// "## Prompt N" headers, each followed by its reply.
std::string render_sections(const std::vector<Section>& sections);

struct StageModel {
    std::string model;
    llm::DecodingParams params;
};

AnalysisText run_rgb_analysis(const Image& rgb, const std::shared_ptr<llm::ChatBackend>& backend,
                              const PromptCorpus& corpus, const StageModel& model);

AnalysisText run_moisture_analysis(const Image& moisture,
                                   const std::shared_ptr<llm::ChatBackend>& backend,
                                   const PromptCorpus& corpus, const StageModel& model);

/// Nothing when water_fraction is below the significance cutoff; otherwise
/// one fresh chat per water prompt, each carrying the water system prompt.
std::optional<AnalysisText> run_water_analysis(const Image& water_preprocessed,
                                               double water_fraction, double significance_cutoff,
                                               const std::shared_ptr<llm::ChatBackend>& backend,
                                               const PromptCorpus& corpus, const StageModel& model);

/// Revised RGB analysis taking the water findings into account.
AnalysisText apply_water_modification(const Image& rgb, const std::string& rgb_text,
                                      const std::string& water_text,
                                      const std::shared_ptr<llm::ChatBackend>& backend,
                                      const PromptCorpus& corpus, const StageModel& model);

/// Two-turn chat under the report system prompt. `rendered` holds the final
/// reply only, which is what climate_report.txt contains.
AnalysisText generate_climate_report(const std::string& location, const std::string& rgb_text,
                                     const std::string& moisture_text,
                                     const std::shared_ptr<llm::ChatBackend>& backend,
                                     const PromptCorpus& corpus, const StageModel& model);

/// Text to paste into an external adaptation-strategy assistant: a framing
/// line for `location` followed by the report verbatim.
std::string assemble_downstream_prompt(const std::string& report, const std::string& location);

/// Thresholds and denoises water.png into the mask analysed by the water stage.
raster::BinaryMask preprocess_water(const Image& water, const raster::WaterMaskParams& params);

// Module ids.
inline constexpr const char* kSatelliteLoader = "satellite_loader";
inline constexpr const char* kRgbAnalysis = "rgb_analysis";
inline constexpr const char* kMoistureAnalysis = "moisture_analysis";
inline constexpr const char* kWaterPreprocessing = "water_preprocessing";
inline constexpr const char* kWaterAnalysis = "water_analysis";
inline constexpr const char* kWaterRgbAnalysis = "water_rgb_analysis";
inline constexpr const char* kClimateReport = "climate_report";
inline constexpr const char* kDownstreamPrompt = "downstream_prompt";

// Artifact names.
inline constexpr const char* kRgbPng = "rgb.png";
inline constexpr const char* kMoisturePng = "moisture.png";
inline constexpr const char* kWaterPng = "water.png";
inline constexpr const char* kRgbAnalysisTxt = "rgb_analysis.txt";
inline constexpr const char* kMoistureAnalysisTxt = "moisture_analysis.txt";
inline constexpr const char* kWaterPreprocessedPng = "water_preprocessed.png";
inline constexpr const char* kWaterAnalysisTxt = "water_analysis.txt";
inline constexpr const char* kClimateReportTxt = "climate_report.txt";
inline constexpr const char* kDownstreamPromptTxt = "downstream_prompt.txt";

struct StageModels {
    StageModel rgb{"360vl", {}};
    StageModel water{"360vl", {}};
    StageModel moisture{"360vl", {}};
    StageModel report{"internlm2", {}};
};

struct PipelineSettings {
    std::string location;
    PromptCorpus corpus;
    std::shared_ptr<llm::ChatBackend> backend;
    StageModels models;
    raster::WaterMaskParams water;
    std::function<satellite::ImageSet()> load_images;
};

/// The full module graph: satellite loader, RGB, moisture and water stages,
/// the water-to-RGB revision, the climate report and the downstream prompt.
std::vector<pipeline::ModuleSpec> build_modules(const PipelineSettings& settings);

}  // namespace ecoscapes::analysis
