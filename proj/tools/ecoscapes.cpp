#include "ecoscapes/cli.hpp"
#include "ecoscapes/config.hpp"
#include "ecoscapes/error.hpp"
#include "ecoscapes/evaluation.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ecoscapes;

namespace {

config::Config load(const std::string& path) {
    const auto env = config::process_env();
    return path.empty() ? config::parse_config("", env) : config::load_config(path, env);
}

evaluation::System system_arg(const std::string& text) {
    auto s = evaluation::parse_system(text);
    if (!s) throw Error(Errc::InvalidArgument, "unknown system '" + text + "'");
    return *s;
}

evaluation::Criterion criterion_arg(const std::string& text) {
    auto c = evaluation::parse_criterion(text);
    if (!c) throw Error(Errc::InvalidArgument, "unknown criterion '" + text + "'");
    return *c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local climate reports from satellite imagery"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);

    std::string location;
    auto* run = app.add_subcommand("run", "Run the full pipeline for a location");
    run->add_option("location", location, "Town or city name")->required();
    bool invert_manual = false;
    run->add_flag("--invert-water", invert_manual, "Invert a manually supplied water.png");

    std::string bands_dir, out_dir;
    bool invert_water = false;
    auto* indices = app.add_subcommand("indices", "Render rgb/moisture/water images from band files");
    indices->add_option("--bands", bands_dir, "Directory of band PNGs with JSON sidecars")->required();
    indices->add_option("--out", out_dir, "Output directory")->required();
    indices->add_flag("--invert-water", invert_water, "Render water with the browser ramp (water dark)");

    auto* score = app.add_subcommand("score", "Record and summarize rubric scores");
    score->require_subcommand(1);
    std::string score_file = "scores.csv";
    score->add_option("--file", score_file, "Score CSV file")->capture_default_str();

    evaluation::ScoreRecord record;
    std::string sys_text, crit_text;
    auto* add = score->add_subcommand("add", "Append one score");
    add->add_option("--location", record.location)->required();
    add->add_option("--system", sys_text, "CC, CC+EcoScapes or EcoScapes")->required();
    add->add_option("--criterion", crit_text,
                    "Correctness, DepthCoverage, Usability or Relevancy")->required();
    add->add_option("--run", record.run_index, "1-based run index")->required();
    add->add_option("--value", record.value, "Score 0-5")->required();

    std::string sum_location, sum_criterion, json_out;
    std::vector<std::string> sum_systems;
    auto* summary = score->add_subcommand("summary", "Five-number summaries per system");
    summary->add_option("--location", sum_location)->required();
    summary->add_option("--criterion", sum_criterion)->required();
    summary->add_option("--system", sum_systems, "Restrict to these systems");
    summary->add_option("--json", json_out, "Also write the summary as JSON");

    auto* validate = app.add_subcommand("validate-manual", "Check a manual image set");
    validate->add_option("location", location)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = load(config_path);
        if (*run) {
            if (invert_manual) cfg.invert_water = true;
            return cli::cmd_run(location, cfg, {}, std::cout, std::cerr);
        }
        if (*indices) {
            return cli::cmd_indices(bands_dir, out_dir, cfg, invert_water || cfg.invert_water,
                                    std::cout, std::cerr);
        }
        if (*add) {
            record.system = system_arg(sys_text);
            record.criterion = criterion_arg(crit_text);
            return cli::cmd_score_add(score_file, record, std::cout, std::cerr);
        }
        if (*summary) {
            std::optional<std::vector<evaluation::System>> systems;
            if (!sum_systems.empty()) {
                systems.emplace();
                for (const auto& s : sum_systems) systems->push_back(system_arg(s));
            }
            std::optional<std::filesystem::path> json_path;
            if (!json_out.empty()) json_path = json_out;
            return cli::cmd_score_summary(score_file, sum_location, criterion_arg(sum_criterion),
                                          systems, json_path, std::cout, std::cerr);
        }
        if (*validate) {
            return cli::cmd_validate_manual(location, cfg, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
