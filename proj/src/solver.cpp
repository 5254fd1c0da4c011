#include "levydiv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "levydiv/error.hpp"

namespace levydiv {

namespace {

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::ParseError, "missing key " + key);
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, "bad number for " + key + ": " + it->second);
    }
}

}  // namespace

KeyValues to_key_values(const Solution& s) {
    return {
        {"b_star", format_number(s.b_star)},
        {"f_b_star", format_number(s.f_at_b_star)},
        {"phi_q", format_number(s.phi_q)},
        {"varphi_q", format_number(s.varphi_q)},
        {"g_residual", format_number(s.g_residual)},
        {"zero_threshold", s.zero_threshold ? "true" : "false"},
    };
}

Solution solution_from_key_values(const std::map<std::string, std::string>& kv) {
    Solution s;
    s.b_star = parse_double(kv, "b_star");
    s.f_at_b_star = parse_double(kv, "f_b_star");
    s.phi_q = parse_double(kv, "phi_q");
    s.varphi_q = parse_double(kv, "varphi_q");
    s.g_residual = parse_double(kv, "g_residual");
    const auto it = kv.find("zero_threshold");
    if (it == kv.end()) throw Error(ErrorCode::ParseError, "missing key zero_threshold");
    s.zero_threshold = it->second == "true";
    return s;
}

DividendProblem::DividendProblem(LevyModel model, ProblemParams params)
    : model_(std::move(model)), params_(params), s_(make_scale_set(model_, params_)),
      mean_rate_(mean_rate(model_)) {}

DividendProblem DividendProblem::validated(LevyModel model, ProblemParams params) {
    validate(model, params);
    return DividendProblem(std::move(model), params);
}

double DividendProblem::tail_W(double b) const { return weighted_tail_integral(s_.W, s_.varphi_q, b); }

double DividendProblem::tail_dW(double b) const { return weighted_tail_integral(s_.dW, s_.varphi_q, b); }

double DividendProblem::f_of_b(double b) const {
    const double iw = tail_W(b);
    return (params_.beta * s_.Z(b) - 1.0 + params_.beta * params_.q * iw) / (s_.varphi_q * iw);
}

double DividendProblem::h_of_b(double b) const { return 1.0 - s_.W(b) / (s_.varphi_q * tail_W(b)); }

double DividendProblem::g_of_b(double b) const {
    return params_.beta * s_.Z(b) - 1.0 - s_.W(b) * f_of_b(b);
}

double DividendProblem::g_factored(double b) const {
    return (params_.beta * s_.Z(b) - 1.0) * h_of_b(b) - params_.beta * params_.q * s_.W(b) / s_.varphi_q;
}

double DividendProblem::g_over_h(double b) const {
    return params_.beta * s_.Z(b) - 1.0 - params_.beta * params_.q * s_.W(b) * tail_W(b) / tail_dW(b);
}

double DividendProblem::zero_threshold_criterion() const {
    const double b = params_.beta;
    const double w0 = model_.bounded_variation() ? 1.0 / model_.c : 0.0;
    return b - 1.0 + (1.0 - b - b * params_.q / (params_.delta * s_.varphi_q)) * params_.delta * w0;
}

Solution DividendProblem::find_threshold() const {
    Solution sol;
    sol.phi_q = s_.phi_q;
    sol.varphi_q = s_.varphi_q;
    const double g0 = g_of_b(0.0);
    if (g0 <= 0.0) {
        sol.zero_threshold = true;
        sol.b_star = 0.0;
        sol.f_at_b_star = f_of_b(0.0);
        sol.g_residual = g0;
        return sol;
    }
    // g need not be monotone: walk brackets [0,1], [1,2], [2,4], ... on a fine
    // sub-grid so the first sign change is found.
    constexpr int kSub = 16;
    double lo = 0.0;
    double hi = 0.0;
    bool found = false;
    for (double a = 0.0, c = 1.0; c <= 1e6 && !found; a = c, c *= 2.0) {
        for (int i = 1; i <= kSub; ++i) {
            const double x = a + (c - a) * i / kSub;
            if (g_of_b(x) <= 0.0) {
                hi = x;
                lo = a + (c - a) * (i - 1) / kSub;
                found = true;
                break;
            }
        }
    }
    if (!found) throw Error(ErrorCode::BracketFailure, "g stays positive up to b = 1e6");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g_of_b(mid) <= 0.0) hi = mid; else lo = mid;
    }
    sol.b_star = hi;
    sol.f_at_b_star = f_of_b(hi);
    sol.g_residual = g_of_b(hi);
    return sol;
}

double DividendProblem::value_b0(double x) const {
    if (x < 0.0) return value_b0(0.0) + params_.beta * x;
    const double q = params_.q;
    const double d = params_.delta;
    return d / q + params_.beta * (mean_rate_ / q + s_.ZYbar(x) - d / q - s_.ZY(x) / s_.varphi_q);
}

double DividendProblem::value_general(double b, double x) const {
    if (x < 0.0) return value_general(b, 0.0) + params_.beta * x;
    const double q = params_.q;
    const double d = params_.delta;
    const double beta = params_.beta;
    return -d * s_.WYbar(x - b) + beta * (s_.Zbar(x) + mean_rate_ / q) +
           beta * d * convolve_segment(s_.WY, s_.Z, b, x) -
           f_of_b(b) / q * (s_.Z(x) + q * d * convolve_segment(s_.WY, s_.W, b, x));
}

namespace {

// Drops exponentials that cannot survive in a bounded function, after checking
// that cancellation left them negligible.
ExpMixture drop_growing(const ExpMixture& m, const char* what) {
    double scale = 1.0;
    for (const ExpTerm& t : m.terms())
        if (t.rate.real() <= 0.0) scale = std::max(scale, std::abs(t.coef));
    std::vector<ExpTerm> kept;
    for (const ExpTerm& t : m.terms()) {
        if (t.rate.real() > 1e-9 || (t.rate == Complex(0.0) && t.power > 0)) {
            if (std::abs(t.coef) > 1e-8 * scale)
                throw Error(ErrorCode::NoConvergence, std::string(what) + " keeps a growing term above the threshold");
            continue;
        }
        kept.push_back(t);
    }
    return ExpMixture(std::move(kept));
}

}  // namespace

ExpMixture DividendProblem::value_above(double b) const {
    const double q = params_.q;
    const double d = params_.delta;
    const double beta = params_.beta;
    ExpMixture m;
    if (b == 0.0) {
        m = beta * (s_.ZYbar + (-1.0 / s_.varphi_q) * s_.ZY);
        m = m.plus_constant(d / q + beta * (mean_rate_ / q - d / q));
    } else {
        m = -d * s_.WYbar + beta * shift_mixture(s_.Zbar, b) + beta * d * convolve_mixture(s_.WY, s_.Z, b) +
            (-f_of_b(b) / q) * (shift_mixture(s_.Z, b) + q * d * convolve_mixture(s_.WY, s_.W, b));
        m = m.plus_constant(beta * mean_rate_ / q);
    }
    return drop_growing(m, "value function");
}

ExpMixture DividendProblem::ruin_laplace_above(double b) const {
    const double q = params_.q;
    const double d = params_.delta;
    const double ratio = tail_W(b) / tail_dW(b);
    const ExpMixture m = shift_mixture(s_.Z, b) + d * q * convolve_mixture(s_.WY, s_.W, b) +
                         (-q * ratio) * (shift_mixture(s_.W, b) + d * convolve_mixture(s_.WY, s_.dW, b));
    return drop_growing(m, "ruin transform");
}

double DividendProblem::value_at(double b, double x) const {
    if (x < 0.0) return value_at(b, 0.0) + params_.beta * x;
    if (x < b) return value_general(b, x);
    return value_above(b)(x - b);
}

double DividendProblem::slope_below(double b, double x) const {
    return params_.beta * s_.Z(x) - s_.W(x) * f_of_b(b);
}

double DividendProblem::curvature_below(double b, double x) const {
    return params_.beta * params_.q * s_.W(x) - f_of_b(b) * s_.dW(x);
}

OneSided DividendProblem::value_derivative_at(double b, double x) const {
    const double beta = params_.beta;
    if (x < 0.0) return {beta, beta};
    const double below = x == 0.0 ? beta : slope_below(b, x);
    if (x < b) return {below, below};
    const double above = value_above(b).derivative()(x - b);
    return {x == b ? below : above, above};
}

OneSided DividendProblem::value_second_derivative_at(double b, double x) const {
    if (x < 0.0) return {0.0, 0.0};
    const double below = x == 0.0 ? 0.0 : curvature_below(b, x);
    if (x < b) return {below, below};
    const double above = value_above(b).derivative().derivative()(x - b);
    return {x == b ? below : above, above};
}

double DividendProblem::refracted_ruin_laplace(double b, double x) const {
    if (x < 0.0) return 1.0;
    if (x < b) {
        const double ratio = tail_W(b) / tail_dW(b);
        return s_.Z(x) - params_.q * ratio * s_.W(x);
    }
    return ruin_laplace_above(b)(x - b);
}

}  // namespace levydiv
