#include "levydiv/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levydiv/error.hpp"

namespace levydiv {

namespace {

constexpr double kQuadTol = 1e-9;

double integrate_segment(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    // Deep refinement only accumulates rounding noise from the value function at large x.
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 6, 1e-11, &err, &l1);
    if (!std::isfinite(val) || err > kQuadTol * std::max(1.0, l1)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "jump integral on [%g, %g] has error estimate %.3g", a, b, err);
        throw Error(ErrorCode::QuadratureFailure, msg);
    }
    return val;
}

}  // namespace

TestFunction mixture_function(const ExpMixture& m) {
    const auto& below = m.below_zero();
    if (below.size() > 2) throw Error(ErrorCode::BadParameters, "extension below zero must be linear");
    TestFunction f;
    const ExpMixture d1 = m.derivative();
    const ExpMixture d2 = d1.derivative();
    f.value = [m](double x) { return m(x); };
    f.d1 = [d1](double x) { return d1(x); };
    f.d2 = [d2](double x) { return d2(x); };
    f.below_intercept = below.empty() ? 0.0 : below[0];
    f.below_slope = below.size() > 1 ? below[1] : 0.0;
    return f;
}

TestFunction shifted_function(const ExpMixture& m, double shift) {
    TestFunction f = mixture_function(m);
    const ExpMixture d1 = m.derivative();
    const ExpMixture d2 = d1.derivative();
    f.value = [m, shift](double x) { return m(x - shift); };
    f.d1 = [d1, shift](double x) { return d1(x - shift); };
    f.d2 = [d2, shift](double x) { return d2(x - shift); };
    f.below_intercept -= f.below_slope * shift;
    if (shift > 0.0) f.kinks.push_back(shift);
    return f;
}

TestFunction convolution_function(const ExpMixture& A, const ExpMixture& B, double b) {
    TestFunction f;
    const ExpMixture dA = A.derivative();
    const ExpMixture d2A = dA.derivative();
    const ExpMixture dB = B.derivative();
    const double a0 = A(0.0);
    const double da0 = dA(0.0);
    f.value = [A, B, b](double x) { return convolve_segment(A, B, b, x); };
    f.d1 = [=](double x) { return x < b ? 0.0 : a0 * B(x) + convolve_segment(dA, B, b, x); };
    f.d2 = [=](double x) { return x < b ? 0.0 : a0 * dB(x) + da0 * B(x) + convolve_segment(d2A, B, b, x); };
    if (b > 0.0) f.kinks.push_back(b);
    return f;
}

TestFunction value_function(const DividendProblem& problem, double b) {
    TestFunction f;
    const DividendProblem* p = &problem;
    const ExpMixture above = problem.value_above(b);
    const ExpMixture d1 = above.derivative();
    const ExpMixture d2 = d1.derivative();
    f.value = [p, b, above](double x) { return x < b ? p->value_at(b, x) : above(x - b); };
    f.d1 = [p, b, d1](double x) { return x < b ? p->value_derivative_at(b, x).right : d1(x - b); };
    f.d2 = [p, b, d2](double x) { return x < b ? p->value_second_derivative_at(b, x).right : d2(x - b); };
    f.below_intercept = problem.value_at(b, 0.0);
    f.below_slope = problem.params().beta;
    if (b > 0.0) f.kinks.push_back(b);
    return f;
}

TestFunction plus_constant(TestFunction f, double a) {
    auto inner = f.value;
    f.value = [inner, a](double x) { return inner(x) + a; };
    f.below_intercept += a;
    return f;
}

TestFunction linear_combination(const std::vector<std::pair<double, TestFunction>>& parts) {
    TestFunction f;
    f.value = [parts](double x) {
        double s = 0.0;
        for (const auto& [k, g] : parts) s += k * g.value(x);
        return s;
    };
    f.d1 = [parts](double x) {
        double s = 0.0;
        for (const auto& [k, g] : parts) s += k * g.d1(x);
        return s;
    };
    f.d2 = [parts](double x) {
        double s = 0.0;
        for (const auto& [k, g] : parts) s += k * g.d2(x);
        return s;
    };
    for (const auto& [k, g] : parts) {
        f.below_intercept += k * g.below_intercept;
        f.below_slope += k * g.below_slope;
        f.kinks.insert(f.kinks.end(), g.kinks.begin(), g.kinks.end());
    }
    std::sort(f.kinks.begin(), f.kinks.end());
    f.kinks.erase(std::unique(f.kinks.begin(), f.kinks.end()), f.kinks.end());
    return f;
}

double generator_apply(const LevyModel& model, const TestFunction& f, double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::BadParameters, "generator is evaluated at x > 0");
    const double fx = f.value(x);
    double out = model.c * f.d1(x) + 0.5 * model.sigma * model.sigma * f.d2(x);
    if (!model.has_jumps()) return out;

    const PhaseTypeLaw& law = model.jumps;
    std::vector<double> cuts{0.0};
    for (double k : f.kinks)
        if (k > 0.0 && k < x) cuts.push_back(x - k);
    cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    const std::function<double(double)> integrand = [&](double z) { return f.value(x - z) * law.density(z); };
    double inside = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) inside += integrate_segment(integrand, cuts[i], cuts[i + 1]);
    // z > x: F(x - z) = a + s (x - z).
    const double tail = f.below_intercept * law.survival(x) - f.below_slope * law.excess_mean(x);
    out += model.kappa * (inside + tail - fx * law.mass());
    return out;
}

double generator_apply_refracted(const LevyModel& model, const ProblemParams& params, const TestFunction& f,
                                 double x) {
    return generator_apply(model, f, x) - params.delta * f.d1(x);
}

std::vector<double> verification_grid(double b, const VerificationConfig& cfg) {
    std::vector<double> xs = grid_points(cfg.grid_step, b + cfg.span_above, cfg.grid_step);
    for (int k = 0; k < 6; ++k) {
        const double h = cfg.fine_step * std::ldexp(1.0, k);
        xs.push_back(h);
        if (b > 0.0) {
            xs.push_back(b + h);
            if (b - h > 0.0) xs.push_back(b - h);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::erase_if(xs, [b](double x) { return x <= 0.0 || std::abs(x - b) < 1e-12; });
    return xs;
}

OneSided smooth_fit_report(const DividendProblem& problem, double b) {
    return {problem.value_derivative_at(b, b).gap(), problem.value_second_derivative_at(b, b).gap()};
}

VerificationReport check_hjb(const DividendProblem& problem, double b, const VerificationConfig& cfg) {
    VerificationReport r;
    r.b = b;
    const LevyModel& model = problem.model();
    const ProblemParams& par = problem.params();
    const TestFunction v = value_function(problem, b);
    const double v0 = problem.value_at(b, 0.0);

    for (double x : verification_grid(b, cfg)) {
        GridRecord rec;
        rec.x = x;
        rec.v = v.value(x);
        rec.dv = v.d1(x);
        const double lv = generator_apply(model, v, x) - par.q * rec.v;
        if (x < b) {
            rec.residual = std::abs(lv);
            r.max_generator_residual_below = std::max(r.max_generator_residual_below, rec.residual);
            if (rec.dv < 1.0 - cfg.slope_tol) ++r.slope_violations;
        } else {
            rec.residual = std::abs(lv + par.delta * (1.0 - rec.dv));
            r.max_generator_residual_above = std::max(r.max_generator_residual_above, rec.residual);
            if (rec.dv < -cfg.slope_tol || rec.dv > 1.0 + cfg.slope_tol) ++r.slope_violations;
        }
        // sup over r in [0, delta] of (L - q) v - r v' + r.
        rec.hjb = lv + par.delta * std::max(0.0, 1.0 - rec.dv);
        r.max_hjb_violation = std::max(r.max_hjb_violation, rec.hjb);
        if (rec.dv > par.beta + cfg.slope_tol) ++r.slope_violations;
        if (rec.v < v0 - cfg.slope_tol) ++r.lower_bound_violations;
        r.grid.push_back(rec);
    }

    bool smooth_ok = true;
    if (b > 0.0) {
        r.smooth_fit_gaps = smooth_fit_report(problem, b);
        if (model.bounded_variation()) {
            smooth_ok = std::abs(r.smooth_fit_gaps.left) <= cfg.smooth_fit_tol_bv;
        } else {
            smooth_ok = std::abs(r.smooth_fit_gaps.left) <= cfg.smooth_fit_tol_slope_ubv &&
                        std::abs(r.smooth_fit_gaps.right) <= cfg.smooth_fit_tol_curvature;
            r.slope_gap_at_zero = problem.value_derivative_at(b, 0.0).gap();
            smooth_ok = smooth_ok && std::abs(r.slope_gap_at_zero) <= cfg.slope_tol;
        }
    }
    r.pass = r.max_generator_residual_below <= cfg.generator_tol &&
             r.max_generator_residual_above <= cfg.generator_tol && r.max_hjb_violation <= cfg.generator_tol &&
             r.slope_violations == 0 && r.lower_bound_violations == 0 && smooth_ok;
    return r;
}

VerificationReport check_hjb(const DividendProblem& problem, const Solution& solution,
                             const VerificationConfig& cfg) {
    return check_hjb(problem, solution.b_star, cfg);
}

KeyValues to_key_values(const VerificationReport& r) {
    return {
        {"b", format_number(r.b)},
        {"max_generator_residual_below", format_number(r.max_generator_residual_below)},
        {"max_generator_residual_above", format_number(r.max_generator_residual_above)},
        {"max_hjb_violation", format_number(r.max_hjb_violation)},
        {"slope_violations", std::to_string(r.slope_violations)},
        {"lower_bound_violations", std::to_string(r.lower_bound_violations)},
        {"slope_gap_at_zero", format_number(r.slope_gap_at_zero)},
        {"smooth_fit_slope_gap", format_number(r.smooth_fit_gaps.left)},
        {"smooth_fit_curvature_gap", format_number(r.smooth_fit_gaps.right)},
        {"grid_points", std::to_string(r.grid.size())},
        {"pass", r.pass ? "true" : "false"},
    };
}

void write_grid_csv(std::ostream& os, const VerificationReport& r) {
    os << "x,residual,hjb,v,dv\n";
    for (const auto& g : r.grid) write_csv_row(os, {g.x, g.residual, g.hjb, g.v, g.dv});
}

}  // namespace levydiv
