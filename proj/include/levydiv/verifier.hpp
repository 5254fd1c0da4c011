#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "levydiv/exp_mixture.hpp"
#include "levydiv/levy_model.hpp"
#include "levydiv/solver.hpp"
#include "levydiv/text_io.hpp"

namespace levydiv {

/// A function known in closed form on [0, inf), smooth between `kinks`,
/// extended linearly (intercept + slope * x) to x < 0.
struct TestFunction {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    double below_intercept = 0.0;
    double below_slope = 0.0;
    std::vector<double> kinks;
};

TestFunction mixture_function(const ExpMixture& m);
/// x -> m(x - shift).
TestFunction shifted_function(const ExpMixture& m, double shift);
/// x -> integral_b^x A(x - y) B(y) dy.
TestFunction convolution_function(const ExpMixture& A, const ExpMixture& B, double b);
/// v_b and its exact derivatives.
TestFunction value_function(const DividendProblem& problem, double b);
TestFunction plus_constant(TestFunction f, double a);
/// sum_i k_i F_i, kinks merged.
TestFunction linear_combination(const std::vector<std::pair<double, TestFunction>>& parts);

/// L F(x) = c F'(x) + sigma^2/2 F''(x) + kappa int_0^inf [F(x - z) - F(x)] density(z) dz.
/// The jump integral over [0, x] is adaptive Gauss-Kronrod split at kinks; the
/// part z > x is exact through the linear extension. Throws Error(QuadratureFailure).
double generator_apply(const LevyModel& model, const TestFunction& f, double x);
/// L_Y F = L F - delta F'.
double generator_apply_refracted(const LevyModel& model, const ProblemParams& params, const TestFunction& f,
                                 double x);

struct VerificationConfig {
    double generator_tol = 1e-4;
    double slope_tol = 1e-9;
    double smooth_fit_tol_bv = 1e-8;
    double smooth_fit_tol_curvature = 1e-4;
    double smooth_fit_tol_slope_ubv = 1e-10;
    double grid_step = 0.05;
    double fine_step = 1e-3;
    double span_above = 30.0;
};

struct GridRecord {
    double x = 0.0;
    double residual = 0.0;
    double hjb = 0.0;
    double v = 0.0;
    double dv = 0.0;
};

struct VerificationReport {
    double b = 0.0;
    double max_generator_residual_below = 0.0;
    double max_generator_residual_above = 0.0;
    double max_hjb_violation = 0.0;
    int slope_violations = 0;
    int lower_bound_violations = 0;
    double slope_gap_at_zero = 0.0;
    OneSided smooth_fit_gaps;  // (v' gap, v'' gap) stored in left/right
    bool pass = false;
    std::vector<GridRecord> grid;
};

/// Geometric points near 0 and b, uniform step elsewhere, up to b + span_above.
std::vector<double> verification_grid(double b, const VerificationConfig& cfg);

/// (v' gap, v'' gap) at b from exact mixture derivatives on each side.
OneSided smooth_fit_report(const DividendProblem& problem, double b);

VerificationReport check_hjb(const DividendProblem& problem, double b, const VerificationConfig& cfg = {});
VerificationReport check_hjb(const DividendProblem& problem, const Solution& solution,
                             const VerificationConfig& cfg = {});

KeyValues to_key_values(const VerificationReport& r);
void write_grid_csv(std::ostream& os, const VerificationReport& r);

}  // namespace levydiv
