#pragma once

#include "ecoscapes/config.hpp"
#include "ecoscapes/evaluation.hpp"
#include "ecoscapes/http.hpp"
#include "ecoscapes/llm.hpp"
#include "ecoscapes/pipeline.hpp"
#include "ecoscapes/raster.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ecoscapes::cli {

struct Services {
    std::shared_ptr<http::Transport> transport;  // HttplibTransport when null
    std::shared_ptr<llm::ChatBackend> backend;   // overrides config.backend when set
    std::function<std::chrono::system_clock::time_point()> now;
};

/// 0 when every module succeeded, 2 when the climate report exists but
/// something else failed or was skipped, 1 otherwise.
int exit_code_for(const pipeline::RunReport& report);

/// `<base>/<location>`, or a `run-YYYYmmddTHHMMSS` directory inside it when
/// that already exists.
std::filesystem::path choose_output_dir(const std::filesystem::path& base,
                                        const std::string& location,
                                        std::chrono::system_clock::time_point now);

struct RunOutcome {
    int exit_code = 1;
    std::filesystem::path output_dir;
    std::optional<pipeline::RunReport> report;
};

RunOutcome run(const std::string& location, const config::Config& config, const Services& services,
               std::ostream& out, std::ostream& err);

int cmd_run(const std::string& location, const config::Config& config, const Services& services,
            std::ostream& out, std::ostream& err);

// A band directory holds one greyscale PNG per band plus a JSON sidecar
// {"band": "B03", "file": "B03.png", "scale": 0.0001, "nodata": 0}.
// "file" defaults to the sidecar's stem with .png, "scale" to one over the
// largest sample value of the bit depth, "nodata" to none.
std::map<raster::BandId, raster::BandRaster> read_band_dir(const std::filesystem::path& dir);

int cmd_indices(const std::filesystem::path& bands_dir, const std::filesystem::path& out_dir,
                const config::Config& config, bool invert_water, std::ostream& out,
                std::ostream& err);

int cmd_score_add(const std::filesystem::path& store_path, const evaluation::ScoreRecord& record,
                  std::ostream& out, std::ostream& err);

/// Prints the aligned table; with `json_out`, also writes it as JSON.
int cmd_score_summary(const std::filesystem::path& store_path, const std::string& location,
                      evaluation::Criterion criterion,
                      const std::optional<std::vector<evaluation::System>>& systems,
                      const std::optional<std::filesystem::path>& json_out, std::ostream& out,
                      std::ostream& err);

int cmd_validate_manual(const std::string& location, const config::Config& config,
                        std::ostream& out, std::ostream& err);

}  // namespace ecoscapes::cli
