#pragma once

#include <iosfwd>
#include <string>

#include "levydiv/levy_model.hpp"

namespace levydiv {

struct ModelSpec {
    LevyModel model;
    ProblemParams params;
};

/// Reads `key = value` model files (INI sections optional). Recognised keys:
/// c, sigma, kappa, alpha, T (row-major, rows may be split by ';'), q, beta,
/// delta, and the shorthand jumps = exp(mu) | hyperexp(w1:mu1, w2:mu2, ...).
/// Throws Error(ParseError) with the offending key or line.
ModelSpec parse_model(std::istream& is);
ModelSpec load_model_file(const std::string& path);

/// Parses "exp(2)" or "hyperexp(0.5:1, 0.5:3)".
PhaseTypeLaw parse_jump_shorthand(const std::string& text);

}  // namespace levydiv
