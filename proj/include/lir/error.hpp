#pragma once

#include <stdexcept>
#include <string>

namespace lir {

enum class ErrorCode {
    DimensionMismatch,
    NotNormalized,
    TooFewPoints,
    PackingUnsupported,
    EmptyCorpus,
    IndexOutOfRange,
    LengthNotPackable,
    EmptyPassageRange,
    InvalidParams,
    ChecksumMismatch,
    UnsupportedVersion,
    InvariantViolation,
    HeaderMismatch,
    NormalizationError,
    LengthMismatch,
    UnknownQueryId,
    IoError,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::PackingUnsupported: return "PackingUnsupported";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::LengthNotPackable: return "LengthNotPackable";
        case ErrorCode::EmptyPassageRange: return "EmptyPassageRange";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::HeaderMismatch: return "HeaderMismatch";
        case ErrorCode::NormalizationError: return "NormalizationError";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::UnknownQueryId: return "UnknownQueryId";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace lir
