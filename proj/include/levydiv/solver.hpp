#pragma once

#include <map>
#include <string>

#include "levydiv/levy_model.hpp"
#include "levydiv/scale_engine.hpp"
#include "levydiv/text_io.hpp"

namespace levydiv {

/// Left and right limits of a quantity that may jump at a point.
struct OneSided {
    double left = 0.0;
    double right = 0.0;
    double gap() const noexcept { return right - left; }
};

struct Solution {
    double b_star = 0.0;
    double f_at_b_star = 0.0;
    double phi_q = 0.0;
    double varphi_q = 0.0;
    bool zero_threshold = false;
    double g_residual = 0.0;
};

KeyValues to_key_values(const Solution& s);
Solution solution_from_key_values(const std::map<std::string, std::string>& kv);

/// Closed-form refraction-reflection quantities for one (model, params) pair.
///
/// The constructor does not call validate(): degenerate drift-only fixtures
/// are accepted for oracle tests. Use DividendProblem::validated for real runs.
class DividendProblem {
public:
    DividendProblem(LevyModel model, ProblemParams params);
    static DividendProblem validated(LevyModel model, ProblemParams params);

    const LevyModel& model() const noexcept { return model_; }
    const ProblemParams& params() const noexcept { return params_; }
    const ScaleSet& scales() const noexcept { return s_; }
    double drift_mean() const noexcept { return mean_rate_; }

    /// integral_0^inf e^{-varphi(q) y} W(y + b) dy and the same for W'.
    double tail_W(double b) const;
    double tail_dW(double b) const;

    double f_of_b(double b) const;
    double h_of_b(double b) const;
    double g_of_b(double b) const;
    /// g through (beta Z - 1) h - beta q W / varphi(q); must agree with g_of_b.
    double g_factored(double b) const;
    /// g / h through the tail-integral ratio of W and W'.
    double g_over_h(double b) const;

    /// beta - 1 + (1 - beta - beta q / (delta varphi)) delta W(0), with W(0) = 1/c
    /// under bounded variation and 0 otherwise. b* = 0 iff this is <= 0.
    double zero_threshold_criterion() const;

    /// Smallest b >= 0 with g(b) <= 0. Throws Error(BracketFailure) past b = 1e6.
    Solution find_threshold() const;

    /// v_b(x); x < 0 extends linearly with slope beta, b = 0 uses the closed form.
    double value_at(double b, double x) const;
    /// The four-term convolution formula, valid for every b >= 0 and x >= 0.
    double value_general(double b, double x) const;
    /// v_0(x) without convolutions.
    double value_b0(double x) const;

    /// u -> v_b(b + u) on u >= 0 as a mixture. v_b is bounded, so the growing
    /// exponentials cancel; they are removed here instead of in floating point.
    /// Throws Error(NoConvergence) if a removed coefficient is not negligible.
    ExpMixture value_above(double b) const;

    OneSided value_derivative_at(double b, double x) const;
    OneSided value_second_derivative_at(double b, double x) const;

    /// E_x[e^{-q kappa}; kappa < inf] for the refracted process at level b.
    double refracted_ruin_laplace(double b, double x) const;
    /// u -> refracted_ruin_laplace(b, b + u) on u >= 0, growing terms removed.
    ExpMixture ruin_laplace_above(double b) const;

private:
    double slope_below(double b, double x) const;
    double curvature_below(double b, double x) const;

    LevyModel model_;
    ProblemParams params_;
    ScaleSet s_;
    double mean_rate_ = 0.0;
};

}  // namespace levydiv
