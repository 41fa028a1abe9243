#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace demograph {

enum class ErrorCode {
    // I/O
    MissingFile,
    IoFailure,
    // data model / validation
    SchemaViolation,
    UnequalTrackLength,
    InvalidDemonstration,
    InvalidConfig,
    // estimators
    EmptyInput,
    NonFiniteSample,
    SignalTooShort,
    LengthMismatch,
    SeriesTooShort,
    // interaction analysis
    WindowOutOfBounds,
    UnknownEntity,
    FrameOutOfBounds,
    GridMismatch,
    CoverageGap,
    // selector
    NonFiniteInput,
    NonFiniteParameters,
    EmptyBatch,
    EmptyDataset,
    // planning / synthesis
    InconsistentSegments,
    UnsupportedLetter,
    InvalidRate,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code
/// determines how the CLI maps it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }
    bool is_io() const noexcept {
        return code_ == ErrorCode::MissingFile || code_ == ErrorCode::IoFailure;
    }

private:
    ErrorCode code_;
    std::string detail_;
};

class SchemaViolation : public Error {
public:
    SchemaViolation(std::size_t line, std::string field, const std::string& detail);

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

class UnequalTrackLength : public Error {
public:
    explicit UnequalTrackLength(std::vector<std::string> ids);

    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace demograph
