#include "ecoscapes/error.hpp"

namespace ecoscapes {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::Io: return "Io";
        case Errc::NoMatch: return "NoMatch";
        case Errc::ServiceUnreachable: return "ServiceUnreachable";
        case Errc::MalformedResponse: return "MalformedResponse";
        case Errc::PolarRegion: return "PolarRegion";
        case Errc::IncompleteManualSet: return "IncompleteManualSet";
        case Errc::UnreadableImage: return "UnreadableImage";
        case Errc::NoEligibleScene: return "NoEligibleScene";
        case Errc::BandUnavailable: return "BandUnavailable";
        case Errc::GeometryMismatch: return "GeometryMismatch";
        case Errc::Configuration: return "Configuration";
        case Errc::CycleDetected: return "CycleDetected";
        case Errc::MissingHardDependency: return "MissingHardDependency";
        case Errc::InvalidModule: return "InvalidModule";
        case Errc::ArtifactConflict: return "ArtifactConflict";
        case Errc::BackendUnconfigured: return "BackendUnconfigured";
        case Errc::Transport: return "Transport";
        case Errc::RateLimited: return "RateLimited";
        case Errc::MalformedReply: return "MalformedReply";
        case Errc::ChecksumMismatch: return "ChecksumMismatch";
        case Errc::MissingCorpus: return "MissingCorpus";
        case Errc::MissingPlaceholderInput: return "MissingPlaceholderInput";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::DuplicateKey: return "DuplicateKey";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::NoData: return "NoData";
        case Errc::UnknownKey: return "UnknownKey";
        case Errc::OutOfRangeValue: return "OutOfRangeValue";
        case Errc::MissingToken: return "MissingToken";
    }
    return "Unknown";
}

namespace {

std::string format_what(Errc code, const std::string& message, const std::string& stage) {
    std::string out;
    if (!stage.empty()) {
        out += "[" + stage + "] ";
    }
    out += errc_name(code);
    out += ": ";
    out += message;
    return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::string stage)
    : std::runtime_error(format_what(code, message, stage)),
      code_(code),
      stage_(std::move(stage)),
      message_(message) {}

Error Error::in_stage(std::string stage) const {
    if (!stage_.empty()) {
        return *this;
    }
    return Error(code_, message_, std::move(stage));
}

}  // namespace ecoscapes
