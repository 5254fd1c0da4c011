#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "levydiv/levy_model.hpp"
#include "levydiv/text_io.hpp"

namespace levydiv {

struct SimConfig {
    std::size_t n_paths = 100000;
    /// Euler step used within reach of 0 or b (diffusive models only).
    double dt = 1e-2;
    /// Time horizon; <= 0 selects default_horizon(params).
    double horizon = 0.0;
    std::uint64_t seed = 20240601;
    bool antithetic = false;
    /// The fine step grows as dt * exp(dt_growth * q * t); late errors are
    /// discounted, so this trades little bias for far fewer steps.
    double dt_growth = 0.5;
    /// Largest step taken far from both boundaries.
    double max_step = 5.0;
    /// A coarse step h is used only when sigma sqrt(h) * safety_sigmas + |drift| h
    /// stays below the distance to the nearest boundary.
    double safety_sigmas = 6.0;
    /// 0: LEVY_DIVIDEND_THREADS or hardware concurrency.
    unsigned threads = 0;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    double horizon = 0.0;
    double truncation_bound = 0.0;
    std::string bias_note;
};

/// Per-path outcome; ruin_time is NaN when not ruined (or for NPV runs).
struct PathRecord {
    double dividends = 0.0;
    double injections = 0.0;
    double ruin_time = 0.0;
};

/// delta / q * e^{-q horizon}: bound on discounted dividends after the horizon.
double truncation_bound(const ProblemParams& params, double horizon);
/// Smallest horizon with truncation_bound <= tol.
double default_horizon(const ProblemParams& params, double tol = 1e-6);

/// Draws phase-type variates by running the absorbing chain.
class PhaseTypeSampler {
public:
    explicit PhaseTypeSampler(const PhaseTypeLaw& law);

    double operator()(std::mt19937_64& rng) const;

private:
    int dim_ = 0;
    std::vector<double> start_cdf_;        // dim + 1 entries, last = defect
    std::vector<double> exit_rate_;        // -T_ii
    std::vector<std::vector<double>> cdf_;  // per phase: dim next-phase entries, then absorption
    std::vector<int> forced_;               // the only successor, or -1
};

/// Expected NPV of the refraction-reflection strategy at level b from x0,
/// estimated from discounted dividends minus beta times discounted injections.
MCEstimate simulate_npv(const LevyModel& model, const ProblemParams& params, double b, double x0,
                        const SimConfig& cfg, std::vector<PathRecord>* paths = nullptr);

/// E_x0[e^{-q kappa}; kappa < horizon] for the refracted process at level b
/// (no reflection), kappa the first passage below 0.
MCEstimate simulate_ruin_laplace(const LevyModel& model, const ProblemParams& params, double b, double x0,
                                 const SimConfig& cfg, std::vector<PathRecord>* paths = nullptr);

KeyValues to_key_values(const MCEstimate& e);
void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& paths);

}  // namespace levydiv
