#include "levydiv/error.hpp"

namespace levydiv {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MonotonePaths: return "MonotonePaths";
        case ErrorCode::DriftTooSmall: return "DriftTooSmall";
        case ErrorCode::BadPhaseType: return "BadPhaseType";
        case ErrorCode::BadParameters: return "BadParameters";
        case ErrorCode::PoleHit: return "PoleHit";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::RepeatedRoots: return "RepeatedRoots";
        case ErrorCode::DivergentTail: return "DivergentTail";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace levydiv
