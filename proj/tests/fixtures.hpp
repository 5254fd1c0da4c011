#pragma once

#include <cmath>

#include "levydiv/levy_model.hpp"

namespace fx {

using levydiv::LevyModel;
using levydiv::PhaseTypeLaw;
using levydiv::ProblemParams;

inline LevyModel make(double c, double sigma, double kappa, PhaseTypeLaw jumps) {
    LevyModel m;
    m.c = c;
    m.sigma = sigma;
    m.kappa = kappa;
    m.jumps = std::move(jumps);
    return m;
}

// The two numerical cases with the Erlang-mix Weibull(2, 1) fit.
inline LevyModel case1() { return make(2.0, 0.2, 2.0, PhaseTypeLaw::weibull2_erlang_mix()); }
inline LevyModel case2() { return make(4.0, 0.0, 2.0, PhaseTypeLaw::weibull2_erlang_mix()); }
// Case-2 drift with exponential(2) jumps: psi is a quadratic over a linear.
inline LevyModel exp_case() { return make(4.0, 0.0, 2.0, PhaseTypeLaw::exponential(2.0)); }
inline LevyModel drift_only(double c) { return make(c, 0.0, 0.0, PhaseTypeLaw::exponential(1.0)); }
inline LevyModel brownian(double c, double sigma) { return make(c, sigma, 0.0, PhaseTypeLaw::exponential(1.0)); }

inline ProblemParams params(double beta = 1.5, double delta = 1.0) { return {0.05, beta, delta}; }

// Positive root of a x^2 + b x + c = 0 (c < 0 < a).
inline double pos_root(double a, double b, double c) { return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a); }
inline double neg_root(double a, double b, double c) { return (-b - std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace fx
