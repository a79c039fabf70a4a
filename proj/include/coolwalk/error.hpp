#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coolwalk {

enum class ErrorCode {
    WeightSum,
    EllipticityViolated,
    NotNested,
    InvalidArgument,
    PreconditionFlatPiece,
    PreconditionNested,
    WindowTooSmall,
    EmptyFinitePart,
    MeansUnavailable,
    IntervalTooLongForExactDP,
    ParseError,
    ValidationError,
};

constexpr std::string_view error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::WeightSum: return "WeightSum";
    case ErrorCode::EllipticityViolated: return "EllipticityViolated";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PreconditionFlatPiece: return "PreconditionFlatPiece";
    case ErrorCode::PreconditionNested: return "PreconditionNested";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::EmptyFinitePart: return "EmptyFinitePart";
    case ErrorCode::MeansUnavailable: return "MeansUnavailable";
    case ErrorCode::IntervalTooLongForExactDP: return "IntervalTooLongForExactDP";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code; the
/// message is prefixed with the code name so it survives plain `what()` logging.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace coolwalk
