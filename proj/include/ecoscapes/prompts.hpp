#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ecoscapes::analysis {

// The fixed prompt texts driving every analysis stage.
struct PromptCorpus {
    std::vector<std::string> rgb_prompts;          // 14, single-turn, image attached
    std::vector<std::string> moisture_prompts;     // 7
    std::string water_system;                      // shared by all water chats
    std::vector<std::string> water_user_prompts;   // 3, one fresh chat each
    std::string report_system;
    std::vector<std::string> report_user_templates;  // {location}; {rgb_analysis}, {moisture_analysis}
    std::string modification_template;              // {water_analysis}, {rgb_analysis}
};

inline constexpr const char* kCorpusFiles[] = {
    "rgb_analysis.json",   "moisture_analysis.json",      "water_analysis.json",
    "climate_report.json", "water_rgb_modification.json",
};

/// Loads and verifies the corpus in `dir`. Every prompt must match its
/// compiled-in SHA-256 and every file must match manifest.json, otherwise
/// ChecksumMismatch. Missing files raise MissingCorpus.
PromptCorpus load_prompt_corpus(const std::filesystem::path& dir);

/// Substitutes `{name}` placeholders in one left-to-right pass, so inserted
/// values are never rescanned. Throws MissingPlaceholderInput for a
/// placeholder without a non-empty value.
std::string fill_template(const std::string& templ, const std::map<std::string, std::string>& values);

}  // namespace ecoscapes::analysis
