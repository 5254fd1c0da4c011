#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace levydiv {

enum class ErrorCode {
    MonotonePaths,
    DriftTooSmall,
    BadPhaseType,
    BadParameters,
    PoleHit,
    NoConvergence,
    RepeatedRoots,
    DivergentTail,
    BracketFailure,
    QuadratureFailure,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace levydiv
