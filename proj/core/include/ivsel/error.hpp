#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ivsel {

enum class ErrorKind {
    DimensionMismatch,
    ZeroColumn,
    InvalidArgument,
    SingularSystem,
    EmptyPattern,
    DegenerateDesign,
    TooFewRegressors,
    EmptyChain,
    MissingThetaDraws,
    UnmappedRegressor,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for errors caused by malformed or inconsistent input data, as opposed
/// to failures during computation.
bool is_data_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace ivsel
