#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecoscapes {

enum class Errc {
    InvalidArgument,
    Io,
    // geo_location
    NoMatch,
    ServiceUnreachable,
    MalformedResponse,
    PolarRegion,
    // satellite_acquisition
    IncompleteManualSet,
    UnreadableImage,
    NoEligibleScene,
    BandUnavailable,
    GeometryMismatch,
    Configuration,
    // pipeline_core
    CycleDetected,
    MissingHardDependency,
    InvalidModule,
    ArtifactConflict,
    // llm_backend
    BackendUnconfigured,
    Transport,
    RateLimited,
    MalformedReply,
    // analysis_suite
    ChecksumMismatch,
    MissingCorpus,
    MissingPlaceholderInput,
    // evaluation_harness
    OutOfRange,
    DuplicateKey,
    EmptyInput,
    NoData,
    // config
    UnknownKey,
    OutOfRangeValue,
    MissingToken,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure raised by the library. `stage` names the pipeline stage or
// operation that failed and is prefixed to what().
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::string stage = {});

    Errc code() const noexcept { return code_; }
    const std::string& stage() const noexcept { return stage_; }
    const std::string& message() const noexcept { return message_; }

    // Copy of this error attributed to `stage` (keeps an existing stage).
    Error in_stage(std::string stage) const;

private:
    Errc code_;
    std::string stage_;
    std::string message_;
};

}  // namespace ecoscapes
