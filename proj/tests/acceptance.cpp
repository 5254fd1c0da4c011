// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fixtures.hpp"
#include "levydiv/scale_engine.hpp"
#include "levydiv/simulator.hpp"
#include "levydiv/solver.hpp"
#include "levydiv/verifier.hpp"

using namespace levydiv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("criterion %d: %s  %s (%s)\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double laplace_by_quadrature(const ExpMixture& W, double s) {
    auto tail = [&](double X) {
        double t = 0.0;
        for (const ExpTerm& term : W.terms())
            t += std::abs(term.coef) * std::exp((term.rate.real() - s) * X) / (s - term.rate.real());
        return t;
    };
    double X = 10.0;
    while (tail(X) >= 1e-10) X *= 1.5;
    double sum = 0.0;
    for (double a = 0.0; a < X; a += 2.0)
        sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double x) { return std::exp(-s * x) * W(x); }, a, std::min(a + 2.0, X), 15, 1e-14);
    return sum;
}

std::vector<double> fig3_betas() {
    std::vector<double> v;
    for (int i = 1; i <= 9; ++i) v.push_back(1.0 + 0.01 * i);
    for (int i = 11; i <= 30; ++i) v.push_back(0.1 * i);
    return v;
}

std::vector<double> fig3_deltas() {
    std::vector<double> v;
    for (int i = 1; i <= 9; ++i) v.push_back(0.01 * i);
    for (int i = 1; i <= 30; ++i) v.push_back(0.1 * i);
    return v;
}

void criterion1() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const auto& m : {fx::case1(), fx::case2()}) {
        const auto W = build_W(m, 0.05);
        const double phi = phi_root(m, 0.05);
        for (double s : {phi + 0.15, phi + 0.5, phi + 1.0, 2.5, 6.0}) {
            const double want = 1.0 / (laplace_exponent(m, s) - 0.05);
            worst = std::max(worst, fx::rel_err(laplace_by_quadrature(W, s), want));
        }
    }
    const double t = seconds_since(t0);
    report(1, worst <= 1e-7 && t < 1.0, "Laplace transform of W",
           fmt("max rel err %.2e over 10 points, %.3f s", worst, t));
}

void criterion2() {
    const double w1 = build_W(fx::case1(), 0.05)(0.0);
    const double w2 = build_W(fx::case2(), 0.05)(0.0);
    report(2, std::abs(w1) <= 1e-8 && std::abs(w2 - 0.25) <= 1e-8, "boundary values W(0)",
           fmt("Case 1 %.3e, Case 2 %.12f", w1, w2));
}

void criterion3() {
    double worst = 0.0;
    double tail_err = 0.0;
    for (const auto& m : {fx::case1(), fx::case2()}) {
        const auto p = fx::params();
        const auto s = make_scale_set(m, p);
        for (int k = 1; k <= 20; ++k) {
            const double x = 0.5 * k;
            const double e4 = p.delta * convolve_segment(s.WY, s.W, 0.0, x) - (s.WYbar(x) - s.Wbar(x));
            const double e5 =
                p.delta * convolve_segment(s.WY, s.Z, 0.0, x) - (s.ZYbar(x) - s.Zbar(x) + p.delta * s.WYbar(x));
            worst = std::max({worst, std::abs(e4), std::abs(e5)});
        }
        tail_err = std::max(tail_err,
                            std::abs(weighted_tail_integral(s.W, s.varphi_q, 0.0) - 1.0 / (p.delta * s.varphi_q)));
    }
    report(3, worst <= 1e-9 && tail_err <= 1e-10, "convolution identities and tail integral",
           fmt("identity err %.2e, tail err %.2e", worst, tail_err));
}

void criterion4() {
    const DividendProblem p1(fx::case1(), fx::params());
    const Solution s1 = p1.find_threshold();
    bool agree = true;
    std::string zeros;
    for (double beta : {1.01, 1.05, 1.1, 1.5, 2.0, 3.0}) {
        const DividendProblem p(fx::case2(), fx::params(beta));
        const Solution s = p.find_threshold();
        agree = agree && (s.zero_threshold == (p.zero_threshold_criterion() <= 0.0));
        agree = agree && (s.zero_threshold || std::abs(s.g_residual) <= 1e-8);
        zeros += fmt("%g:%s ", beta, s.zero_threshold ? "0" : "+");
    }
    const DividendProblem p2(fx::case2(), fx::params());
    const double r1 = p1.g_of_b(40.0) / p1.h_of_b(40.0);
    const double r2 = p2.g_of_b(40.0) / p2.h_of_b(40.0);
    const double gh_min = std::min(r1, r2);
    const double gh_max = std::max(r1, r2);
    const bool ok = std::abs(s1.g_residual) <= 1e-8 && s1.b_star > 0.0 && agree && gh_min > -1.0 - 1e-3 &&
                    gh_max < -0.5;
    report(4, ok, "threshold",
           fmt("Case 1 b* = %.10f, g(b*) = %.2e; Case 2 b* sign by beta [%s]; g/h(40) in [%.6f, %.6f]", s1.b_star,
               s1.g_residual, zeros.c_str(), gh_min, gh_max));
}

void criterion5() {
    const DividendProblem p1(fx::case1(), fx::params());
    const double b1 = p1.find_threshold().b_star;
    const OneSided g1 = smooth_fit_report(p1, b1);
    // Case 2 has b* = 0 at beta = 1.5; smooth fit is checked at the first beta
    // of the threshold grid with b* > 0.
    double beta2 = 0.0;
    double gap2 = 0.0;
    double b2 = 0.0;
    for (double beta : {1.5, 2.0, 3.0}) {
        const DividendProblem p(fx::case2(), fx::params(beta));
        const Solution s = p.find_threshold();
        if (s.b_star > 0.0) {
            beta2 = beta;
            b2 = s.b_star;
            gap2 = smooth_fit_report(p, b2).left;
            break;
        }
    }
    const DividendProblem p2(fx::case2(), fx::params());
    double jump_err = 0.0;
    for (double b : {0.25, 0.5, 1.0, 2.0}) {
        const double want = p2.params().delta * p2.scales().WY(0.0) * p2.g_of_b(b);
        jump_err = std::max(jump_err, std::abs(p2.value_derivative_at(b, b).gap() - want));
    }
    const bool ok = std::abs(g1.right) <= 1e-4 && beta2 > 0.0 && std::abs(gap2) <= 1e-8 && jump_err <= 1e-9;
    report(5, ok, "smooth fit",
           fmt("Case 1 v'' gap %.2e (v' gap %.2e); Case 2 beta = %g, b* = %.6f, v' gap %.2e; jump formula err %.2e",
               g1.right, g1.left, beta2, b2, gap2, jump_err));
}

void criterion6() {
    int violations = 0;
    int monotone = 0;
    for (const auto& m : {fx::case1(), fx::case2()}) {
        const DividendProblem p(m, fx::params());
        const double bs = p.find_threshold().b_star;
        const double beta = p.params().beta;
        double prev = beta;
        for (double x = 0.005; x <= bs + 30.0; x += 0.005) {
            const double d = p.value_derivative_at(bs, x).right;
            if (x < bs) violations += (d > beta + 1e-9) + (d < 1.0 - 1e-9);
            else violations += (d > 1.0 + 1e-9) + (d < -1e-9);
            if (bs > 0.0 && d > prev + 1e-9) ++monotone;
            prev = d;
        }
    }
    report(6, violations == 0 && monotone == 0, "slope bounds and monotone slope",
           fmt("%d bound violations, %d monotonicity violations", violations, monotone));
}

void criterion7() {
    const auto t0 = Clock::now();
    std::string detail;
    bool ok = true;
    for (int which : {1, 2}) {
        const DividendProblem p(which == 1 ? fx::case1() : fx::case2(), fx::params());
        const Solution s = p.find_threshold();
        const auto good = check_hjb(p, s);
        const auto bad = check_hjb(p, s.b_star + 0.5);
        ok = ok && good.pass && !bad.pass && good.max_generator_residual_below <= 1e-4 &&
             good.max_generator_residual_above <= 1e-4;
        detail += fmt("Case %d: residuals %.2e / %.2e, hjb %.2e, wrong b %s; ", which, good.max_generator_residual_below,
                      good.max_generator_residual_above, good.max_hjb_violation, bad.pass ? "passes" : "fails");
    }
    const double t = seconds_since(t0);
    detail += fmt("%.2f s", t);
    report(7, ok && t < 30.0, "HJB certification", detail);
}

void criterion8() {
    double worst = 0.0;
    for (const auto& m : {fx::case1(), fx::case2()}) {
        const DividendProblem p(m, fx::params());
        const double bs = p.find_threshold().b_star;
        const std::vector<double> bl = bs > 0.0
                                           ? std::vector<double>{bs / 3.0, 2.0 * bs / 3.0, 4.0 * bs / 3.0, 2.0 * bs}
                                           : std::vector<double>{0.25, 0.5, 0.75, 1.0};
        for (double b : bl)
            for (double x = 0.0; x <= bs + 10.0 + 1e-12; x += 0.02)
                worst = std::max(worst, p.value_at(b, x) - p.value_at(bs, x));
    }
    report(8, worst <= 1e-9, "dominance of v_{b*}", fmt("max v_b - v_{b*} = %.2e", worst));
}

void criterion9() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    {
        const DividendProblem p(fx::case1(), fx::params());
        const double bs = p.find_threshold().b_star;
        SimConfig cfg;
        SimConfig half = cfg;
        half.dt = 0.5 * cfg.dt;
        for (double x : {0.0, 0.5 * bs, bs, 2.0 * bs}) {
            const MCEstimate a = simulate_npv(fx::case1(), fx::params(), bs, x, cfg);
            const MCEstimate h = simulate_npv(fx::case1(), fx::params(), bs, x, half);
            const double exact = p.value_at(bs, x);
            const double bias = std::abs(a.mean - h.mean);
            const bool gate = bias < 2.0 * (a.std_error + h.std_error);
            const bool agree = std::abs(a.mean - exact) <= 3.0 * a.std_error + bias;
            ok = ok && gate && agree;
            std::printf("  Case 1 x = %.4f: mc %.5f +- %.5f (dt/2: %.5f +- %.5f) exact %.5f\n", x, a.mean,
                        a.std_error, h.mean, h.std_error, exact);
            std::fflush(stdout);
        }
        const MCEstimate r = simulate_ruin_laplace(fx::case1(), fx::params(), bs, bs, cfg);
        const double target = 1.0 / fx::params().beta;
        const bool ruin_ok = std::abs(r.mean - target) <= 3.0 * r.std_error;
        ok = ok && ruin_ok;
        std::printf("  Case 1 ruin transform at b*: mc %.5f +- %.5f, 1/beta %.5f\n", r.mean, r.std_error, target);
    }
    {
        // b* = 0 for Case 2, so the four points collapse; use x = 0 and x = 1.
        const DividendProblem p(fx::case2(), fx::params());
        const double bs = p.find_threshold().b_star;
        SimConfig cfg;
        for (double x : {0.0, 1.0}) {
            const MCEstimate a = simulate_npv(fx::case2(), fx::params(), bs, x, cfg);
            const double exact = p.value_at(bs, x);
            ok = ok && std::abs(a.mean - exact) <= 3.0 * a.std_error;
            std::printf("  Case 2 x = %.4f: mc %.5f +- %.5f exact %.5f\n", x, a.mean, a.std_error, exact);
            std::fflush(stdout);
        }
    }
    const double t = seconds_since(t0);
    detail = fmt("1e5 paths per estimate, %.1f s", t);
    report(9, ok && t <= 300.0, "Monte Carlo agreement", detail);
}

void criterion10() {
    std::vector<double> xs;
    for (double x = 0.0; x <= 15.0 + 1e-12; x += 0.25) xs.push_back(x);
    int beta_bad = 0, delta_bad = 0, bstar_bad = 0;
    for (const auto& m : {fx::case1(), fx::case2()}) {
        std::vector<double> prev;
        double prev_b = -1.0;
        for (double beta : fig3_betas()) {
            const DividendProblem p(m, fx::params(beta));
            const double bs = p.find_threshold().b_star;
            std::vector<double> v;
            for (double x : xs) v.push_back(p.value_at(bs, x));
            if (!prev.empty())
                for (std::size_t i = 0; i < v.size(); ++i) beta_bad += !(v[i] < prev[i]);
            bstar_bad += bs < prev_b;
            prev = v;
            prev_b = bs;
        }
        prev.clear();
        for (double delta : fig3_deltas()) {
            const DividendProblem p(m, fx::params(1.5, delta));
            const double bs = p.find_threshold().b_star;
            std::vector<double> v;
            for (double x : xs) v.push_back(p.value_at(bs, x));
            if (!prev.empty())
                for (std::size_t i = 0; i < v.size(); ++i) delta_bad += v[i] < prev[i] - 1e-12;
            prev = v;
        }
    }
    report(10, beta_bad + delta_bad + bstar_bad == 0, "sensitivity orderings",
           fmt("%zu beta values, %zu delta values, both cases; violations beta %d, delta %d, b* %d",
               fig3_betas().size(), fig3_deltas().size(), beta_bad, delta_bad, bstar_bad));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9, criterion10};
    for (std::size_t i = 0; i < all.size(); ++i) {
        try {
            all[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, "exception", e.what());
        }
    }
    std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
