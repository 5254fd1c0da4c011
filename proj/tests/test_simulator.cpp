#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "levydiv/error.hpp"
#include "levydiv/simulator.hpp"
#include "levydiv/solver.hpp"

using namespace levydiv;

namespace {

SimConfig small(std::size_t n, std::uint64_t seed = 11) {
    SimConfig c;
    c.n_paths = n;
    c.seed = seed;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("truncation bound") {
    CHECK(truncation_bound(fx::params(), 400.0) == doctest::Approx(20.0 * std::exp(-20.0)).epsilon(1e-14));
    CHECK(truncation_bound(fx::params(), 0.0) == doctest::Approx(20.0));
    double prev = truncation_bound(fx::params(), 0.0);
    for (double t = 10.0; t <= 500.0; t += 10.0) {
        const double v = truncation_bound(fx::params(), t);
        CHECK(v < prev);
        prev = v;
    }
    const double h = default_horizon(fx::params());
    CHECK(truncation_bound(fx::params(), h) <= 1e-6 * (1.0 + 1e-12));
    CHECK(truncation_bound(fx::params(), 0.99 * h) > 1e-6);
}

TEST_CASE("phase-type sampler reproduces the mean") {
    const auto law = PhaseTypeLaw::weibull2_erlang_mix();
    const PhaseTypeSampler s(law);
    std::mt19937_64 rng(3);
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s(rng);
        CHECK_FALSE(z < 0.0);
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - law.mean()) < 4.0 * se);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("reproducible and independent of the thread count") {
    auto cfg = small(400, 99);
    const auto a = simulate_npv(fx::case1(), fx::params(), 1.0, 0.5, cfg);
    const auto b = simulate_npv(fx::case1(), fx::params(), 1.0, 0.5, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    cfg.threads = 3;
    const auto c = simulate_npv(fx::case1(), fx::params(), 1.0, 0.5, cfg);
    CHECK(a.mean == c.mean);
    cfg.seed = 100;
    CHECK(simulate_npv(fx::case1(), fx::params(), 1.0, 0.5, cfg).mean != a.mean);
}

TEST_CASE("the bounded-variation scheme has no step parameter") {
    auto cfg = small(300);
    const auto a = simulate_npv(fx::case2(), fx::params(), 0.5, 1.0, cfg);
    cfg.dt = 0.5e-2;
    cfg.max_step = 0.5;
    cfg.dt_growth = 0.0;
    const auto b = simulate_npv(fx::case2(), fx::params(), 0.5, 1.0, cfg);
    CHECK(a.mean == b.mean);
    CHECK(b.dt == 0.0);
    CHECK(a.bias_note.find("no discretization") != std::string::npos);
}

TEST_CASE("Case 2 NPV agrees with the closed form") {
    const DividendProblem p(fx::case2(), fx::params());
    const double b = p.find_threshold().b_star;
    const auto est = simulate_npv(fx::case2(), fx::params(), b, 1.0, small(20000, 5));
    const double exact = p.value_at(b, 1.0);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
    MESSAGE("Case 2 x0=1: mc " << est.mean << " +- " << est.std_error << ", exact " << exact);
    // A positive threshold too.
    const auto est2 = simulate_npv(fx::case2(), fx::params(), 1.0, 2.0, small(20000, 6));
    CHECK(std::abs(est2.mean - p.value_at(1.0, 2.0)) <= 3.0 * est2.std_error);
}

TEST_CASE("reflected Brownian motion with drift, b = 0") {
    const auto m = fx::brownian(1.2, 0.5);
    const DividendProblem p(m, fx::params());
    auto cfg = small(20000, 8);
    const auto est = simulate_npv(m, fx::params(), 0.0, 0.0, cfg);
    cfg.dt *= 0.5;
    const auto half = simulate_npv(m, fx::params(), 0.0, 0.0, cfg);
    const double exact = p.value_at(0.0, 0.0);
    const double bias = std::abs(est.mean - half.mean);
    MESSAGE("BM: mc " << est.mean << " +- " << est.std_error << ", dt/2 " << half.mean << ", exact " << exact);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error + bias);
}

TEST_CASE("NPV decreases in beta and path records are sign-consistent") {
    std::vector<PathRecord> paths;
    const auto lo = simulate_npv(fx::case2(), fx::params(1.5), 0.5, 0.2, small(500), &paths);
    const auto hi = simulate_npv(fx::case2(), fx::params(3.0), 0.5, 0.2, small(500));
    CHECK(hi.mean < lo.mean);
    REQUIRE(paths.size() == 500);
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& r : paths) {
        CHECK(r.dividends >= 0.0);
        CHECK(r.injections >= 0.0);
        CHECK(std::isnan(r.ruin_time));
        const double y = r.dividends - 1.5 * r.injections;
        sum += y;
        sq += y * y;
    }
    const double n = 500.0;
    const double mean = sum / n;
    CHECK(lo.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(lo.std_error == doctest::Approx(std::sqrt((sq - n * mean * mean) / (n - 1.0) / n)).epsilon(1e-8));
    CHECK(lo.n_paths == 500);

    std::vector<PathRecord> diff;
    simulate_npv(fx::case1(), fx::params(), 0.5, 0.2, small(100), &diff);
    for (const auto& r : diff) {
        CHECK(r.dividends >= 0.0);
        CHECK(r.injections >= 0.0);
    }
}

TEST_CASE("ruin transform: far start and the g/h identity") {
    const DividendProblem p1(fx::case1(), fx::params());
    const double b1 = p1.find_threshold().b_star;
    const auto far = simulate_ruin_laplace(fx::case1(), fx::params(), b1, b1 + 30.0, small(2000));
    const double far_exact = p1.refracted_ruin_laplace(b1, b1 + 30.0);
    MESSAGE("Case 1 ruin at b*+30: mc " << far.mean << " +- " << far.std_error << ", exact " << far_exact);
    CHECK(std::abs(far.mean - far_exact) <= 3.0 * far.std_error + far.truncation_bound);
    const DividendProblem p(fx::case2(), fx::params());
    const auto far2 = simulate_ruin_laplace(fx::case2(), fx::params(), 0.0, 30.0, small(20000, 18));
    CHECK(std::abs(far2.mean - p.refracted_ruin_laplace(0.0, 30.0)) <= 3.0 * far2.std_error + far2.truncation_bound);
    for (double b : {1.0, 3.0}) {
        const auto est = simulate_ruin_laplace(fx::case2(), fx::params(), b, b, small(20000, 17));
        const double beta = fx::params().beta;
        CHECK(std::abs(beta * est.mean - 1.0 - p.g_over_h(b)) <= 3.0 * beta * est.std_error);
        CHECK(std::abs(est.mean - p.refracted_ruin_laplace(b, b)) <= 3.0 * est.std_error);
    }
    std::vector<PathRecord> paths;
    simulate_ruin_laplace(fx::case2(), fx::params(), 1.0, 0.0, small(200), &paths);
    int ruined = 0;
    for (const auto& r : paths)
        if (!std::isnan(r.ruin_time)) {
            ++ruined;
            CHECK(r.ruin_time > 0.0);
        }
    CHECK(ruined > 0);
}

TEST_CASE("antithetic pairs") {
    auto cfg = small(400);
    cfg.antithetic = true;
    const auto est = simulate_npv(fx::case1(), fx::params(), 1.0, 1.0, cfg);
    CHECK(std::isfinite(est.mean));
    CHECK(est.std_error > 0.0);
    cfg.n_paths = 401;
    CHECK_THROWS_AS(simulate_npv(fx::case1(), fx::params(), 1.0, 1.0, cfg), Error);
}

TEST_CASE("invalid configurations are rejected") {
    auto bad = small(10);
    bad.dt = 0.0;
    CHECK_THROWS_AS(simulate_npv(fx::case1(), fx::params(), 1.0, 1.0, bad), Error);
    bad = small(10);
    bad.max_step = 1e-3;
    CHECK_THROWS_AS(simulate_npv(fx::case1(), fx::params(), 1.0, 1.0, bad), Error);
    bad = small(0);
    CHECK_THROWS_AS(simulate_npv(fx::case1(), fx::params(), 1.0, 1.0, bad), Error);
    CHECK_THROWS_AS(simulate_npv(fx::case1(), fx::params(), 1.0, -1.0, small(10)), Error);
    CHECK_THROWS_AS(simulate_npv(fx::case1(), fx::params(), -1.0, 1.0, small(10)), Error);
    CHECK_THROWS_AS(simulate_npv(fx::drift_only(2.0), fx::params(), 1.0, 1.0, small(10)), Error);
}

TEST_CASE("paths CSV and key-value output") {
    std::vector<PathRecord> paths;
    const auto est = simulate_ruin_laplace(fx::case2(), fx::params(), 1.0, 0.5, small(3), &paths);
    std::ostringstream os;
    write_paths_csv(os, paths);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "path,discounted_dividends,discounted_injections,ruin_time");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
    std::ostringstream kv;
    write_key_values(kv, to_key_values(est));
    CHECK(kv.str().find("stderr = ") != std::string::npos);
    CHECK(kv.str().find("bias_note = ") != std::string::npos);
}
