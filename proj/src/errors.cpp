#include "demograph/errors.hpp"

namespace demograph {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::UnequalTrackLength: return "UnequalTrackLength";
        case ErrorCode::InvalidDemonstration: return "InvalidDemonstration";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NonFiniteSample: return "NonFiniteSample";
        case ErrorCode::SignalTooShort: return "SignalTooShort";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::WindowOutOfBounds: return "WindowOutOfBounds";
        case ErrorCode::UnknownEntity: return "UnknownEntity";
        case ErrorCode::FrameOutOfBounds: return "FrameOutOfBounds";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::CoverageGap: return "CoverageGap";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::NonFiniteParameters: return "NonFiniteParameters";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::InconsistentSegments: return "InconsistentSegments";
        case ErrorCode::UnsupportedLetter: return "UnsupportedLetter";
        case ErrorCode::InvalidRate: return "InvalidRate";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

SchemaViolation::SchemaViolation(std::size_t line, std::string field, const std::string& detail)
    : Error(ErrorCode::SchemaViolation,
            "line " + std::to_string(line) + ", field '" + field + "': " + detail),
      line_(line),
      field_(std::move(field)) {}

namespace {
std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}
}  // namespace

UnequalTrackLength::UnequalTrackLength(std::vector<std::string> ids)
    : Error(ErrorCode::UnequalTrackLength, "tracks with mismatched length: " + join_ids(ids)),
      ids_(std::move(ids)) {}

}  // namespace demograph
