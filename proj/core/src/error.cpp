#include "ivsel/error.hpp"

namespace ivsel {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroColumn: return "ZeroColumn";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::EmptyPattern: return "EmptyPattern";
        case ErrorKind::DegenerateDesign: return "DegenerateDesign";
        case ErrorKind::TooFewRegressors: return "TooFewRegressors";
        case ErrorKind::EmptyChain: return "EmptyChain";
        case ErrorKind::MissingThetaDraws: return "MissingThetaDraws";
        case ErrorKind::UnmappedRegressor: return "UnmappedRegressor";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_data_error(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ZeroColumn:
        case ErrorKind::UnmappedRegressor:
        case ErrorKind::ParseError:
        case ErrorKind::IoError:
            return true;
        default:
            return false;
    }
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace ivsel
