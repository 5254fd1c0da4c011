#include "levydiv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "levydiv/error.hpp"

namespace levydiv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double uniform01(std::mt19937_64& rng) {
    // (0, 1): never returns 0 so logs stay finite.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) { return -std::log(uniform01(rng)) / rate; }

std::uint64_t mix64(std::uint64_t z) {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream key derived from (seed, path index, tag) alone, so results do not
// depend on how paths are split across workers.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
    return std::mt19937_64(mix64(mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL)) + tag));
}

unsigned worker_count(const SimConfig& cfg, std::size_t n) {
    unsigned t = cfg.threads;
    if (t == 0) {
        t = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("LEVY_DIVIDEND_THREADS")) {
            const long cap = std::strtol(env, nullptr, 10);
            if (cap > 0) t = std::min<unsigned>(t, static_cast<unsigned>(cap));
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
}

enum class Target { Npv, Ruin };

/// Gaussian stream with optional sign flip for antithetic pairs.
struct BrownianStream {
    std::mt19937_64 rng;
    double sign = 1.0;
    boost::random::normal_distribution<double> normal{0.0, 1.0};

    double gauss() { return sign * normal(rng); }
    double uniform() { return uniform01(rng); }
};

class PathSimulator {
public:
    PathSimulator(const LevyModel& model, const ProblemParams& params, double b, const SimConfig& cfg,
                  double horizon, Target target)
        : m_(model), p_(params), b_(b), cfg_(cfg), horizon_(horizon), target_(target), sampler_(model.jumps) {}

    PathRecord run(double x0, BrownianStream& bm, std::mt19937_64& jumps) const {
        return m_.sigma == 0.0 ? run_exact(x0, jumps) : run_diffusive(x0, bm, jumps);
    }

private:
    double next_jump(double t, std::mt19937_64& jumps) const {
        return m_.has_jumps() ? t + exponential(jumps, m_.kappa) : std::numeric_limits<double>::infinity();
    }

    double discounted_payout(double t0, double t1) const {
        // delta int_t0^t1 e^{-q s} ds
        return p_.delta * std::exp(-p_.q * t0) * -std::expm1(-p_.q * (t1 - t0)) / p_.q;
    }

    // sigma = 0: straight-line motion between jumps, b-crossings solved exactly.
    PathRecord run_exact(double x0, std::mt19937_64& jumps) const {
        PathRecord rec{0.0, 0.0, kNaN};
        double t = 0.0;
        double u = x0;
        const double c = m_.c;
        const double c_above = m_.c - p_.delta;
        for (;;) {
            const double tau = next_jump(t, jumps);
            const double t_end = std::min(tau, horizon_);
            if (u < b_) {
                const double hit = t + (b_ - u) / c;
                if (hit >= t_end) {
                    u += c * (t_end - t);
                } else {
                    rec.dividends += discounted_payout(hit, t_end);
                    u = b_ + c_above * (t_end - hit);
                }
            } else {
                rec.dividends += discounted_payout(t, t_end);
                u += c_above * (t_end - t);
            }
            if (tau >= horizon_) break;
            t = tau;
            u -= sampler_(jumps);
            if (u < 0.0) {
                if (target_ == Target::Ruin) {
                    rec.ruin_time = t;
                    break;
                }
                rec.injections += -u * std::exp(-p_.q * t);
                u = 0.0;
            }
        }
        return rec;
    }

    // sigma > 0: exact Gaussian steps far from 0 and b, fine Euler steps near
    // them with the Brownian-bridge minimum handling passage below 0.
    PathRecord run_diffusive(double x0, BrownianStream& bm, std::mt19937_64& jumps) const {
        PathRecord rec{0.0, 0.0, kNaN};
        const double sigma = m_.sigma;
        const double z = cfg_.safety_sigmas;
        const double q = p_.q;
        double t = 0.0;
        double u = x0;
        double disc = 1.0;  // e^{-q t}
        double tau = next_jump(t, jumps);
        const double mu_drift[2] = {m_.c, m_.c - p_.delta};
        // Distance a step of length h can plausibly cover: z sigma sqrt(h) + |mu| h.
        auto reach = [&](double h, int side) { return z * sigma * std::sqrt(h) + std::abs(mu_drift[side]) * h; };
        const double reach_max[2] = {reach(cfg_.max_step, 0), reach(cfg_.max_step, 1)};
        // Refreshed at jump epochs: dt * e^{dt_growth q t}.
        double fine = 0.0, sqrt_fine = 0.0, decay_fine = 0.0;
        double reach_fine[2] = {0.0, 0.0};
        auto refresh = [&] {
            fine = std::min(cfg_.dt * std::exp(cfg_.dt_growth * q * t), cfg_.max_step);
            sqrt_fine = std::sqrt(fine);
            decay_fine = std::exp(-q * fine);
            reach_fine[0] = reach(fine, 0);
            reach_fine[1] = reach(fine, 1);
        };
        refresh();
        while (t < horizon_) {
            const bool above = u > b_;
            const int side = above ? 1 : 0;
            const double mu = mu_drift[side];
            const bool near_zero_side = !above || b_ <= 0.0;
            const double dist = above ? u - b_ : std::min(u, b_ - u);
            double safe;  // longest step whose reach stays within dist
            if (dist >= reach_max[side]) {
                safe = cfg_.max_step;
            } else if (dist <= reach_fine[side]) {
                safe = 0.0;
            } else {
                const double am = std::abs(mu);
                const double root = am > 0.0
                    ? (-z * sigma + std::sqrt(z * z * sigma * sigma + 4.0 * am * dist)) / (2.0 * am)
                    : dist / (z * sigma);
                safe = root * root;
            }
            double h = std::max(fine, safe);
            const bool risky = h > safe;
            const bool capped = h >= tau - t || h >= horizon_ - t;
            if (capped) h = std::min(tau - t, horizon_ - t);
            const bool jump_now = h >= tau - t;

            const bool is_fine = h == fine;
            const double disc_end = disc * (is_fine ? decay_fine : std::exp(-q * h));
            const double u_free = u + mu * h + sigma * (is_fine ? sqrt_fine : std::sqrt(h)) * bm.gauss();
            double u_new = u_free;
            if (above) rec.dividends += p_.delta * (disc - disc_end) / q;
            // The bridge dips below 0 with probability exp(-2 u u_free / (sigma^2 h)) when
            // both ends are positive; below e^{-40} the draw is skipped.
            const bool bridge = risky && near_zero_side &&
                                (u_free <= 0.0 || 2.0 * u * u_free < 40.0 * sigma * sigma * h);
            if (bridge) {
                const double diff = u_free - u;
                const double low = 0.5 * (u + u_free - std::sqrt(diff * diff - 2.0 * sigma * sigma * h * std::log(bm.uniform())));
                if (low < 0.0) {
                    if (target_ == Target::Ruin) {
                        rec.ruin_time = t + 0.5 * h;
                        return rec;
                    }
                    rec.injections += -low * disc_end;
                    u_new = u_free - low;
                }
            } else if (u_new < 0.0) {  // reachable only if the safety margin was exceeded
                if (target_ == Target::Ruin) {
                    rec.ruin_time = t + h;
                    return rec;
                }
                rec.injections += -u_new * disc_end;
                u_new = 0.0;
            }
            u = u_new;
            disc = disc_end;
            t = jump_now ? tau : t + h;
            if (jump_now) {
                u -= sampler_(jumps);
                if (u < 0.0) {
                    if (target_ == Target::Ruin) {
                        rec.ruin_time = t;
                        return rec;
                    }
                    rec.injections += -u * disc;
                    u = 0.0;
                }
                tau = next_jump(t, jumps);
                refresh();
            }
        }
        return rec;
    }

    const LevyModel& m_;
    const ProblemParams& p_;
    double b_;
    const SimConfig& cfg_;
    double horizon_;
    Target target_;
    PhaseTypeSampler sampler_;
};

MCEstimate run_simulation(const LevyModel& model, const ProblemParams& params, double b, double x0,
                          const SimConfig& cfg, Target target, std::vector<PathRecord>* paths) {
    validate(model, params);
    if (!(x0 >= 0.0)) throw Error(ErrorCode::BadParameters, "x0 must be >= 0");
    if (!(b >= 0.0)) throw Error(ErrorCode::BadParameters, "b must be >= 0");
    if (cfg.n_paths < 1) throw Error(ErrorCode::BadParameters, "n_paths must be >= 1");
    if (!(cfg.dt > 0.0)) throw Error(ErrorCode::BadParameters, "dt must be > 0");
    if (!(cfg.max_step >= cfg.dt) || !(cfg.dt_growth >= 0.0) || !(cfg.safety_sigmas > 0.0))
        throw Error(ErrorCode::BadParameters, "need max_step >= dt, dt_growth >= 0, safety_sigmas > 0");
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw Error(ErrorCode::BadParameters, "antithetic sampling needs an even path count");

    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(params);
    const PathSimulator sim(model, params, b, cfg, horizon, target);
    const std::size_t n = cfg.n_paths;
    std::vector<PathRecord> records(n);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t bm_index = cfg.antithetic ? i / 2 : i;
            BrownianStream bm{make_stream(cfg.seed, bm_index, 1u)};
            if (cfg.antithetic && i % 2 == 1) bm.sign = -1.0;
            std::mt19937_64 jumps = make_stream(cfg.seed, i, 2u);
            records[i] = sim.run(x0, bm, jumps);
        }
    };
    const unsigned workers = worker_count(cfg, n);
    if (workers <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(n, w * chunk);
            const std::size_t end = std::min(n, begin + chunk);
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    auto sample = [&](const PathRecord& r) {
        if (target == Target::Npv) return r.dividends - params.beta * r.injections;
        return std::isnan(r.ruin_time) ? 0.0 : std::exp(-params.q * r.ruin_time);
    };
    // Welford over independent units (single paths or antithetic pairs), in path order.
    const std::size_t unit = cfg.antithetic ? 2 : 1;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; i += unit) {
        double y = sample(records[i]);
        if (unit == 2) y = 0.5 * (y + sample(records[i + 1]));
        ++k;
        const double delta = y - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (y - mean);
    }
    MCEstimate est;
    est.mean = mean;
    est.std_error = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
    est.n_paths = n;
    est.dt = model.sigma == 0.0 ? 0.0 : cfg.dt;
    est.horizon = horizon;
    est.truncation_bound = target == Target::Npv ? truncation_bound(params, horizon) : std::exp(-params.q * horizon);

    std::ostringstream note;
    if (target == Target::Npv)
        note << "dividend tail after horizon <= " << format_number(est.truncation_bound)
             << "; injections after horizon omitted, so the estimate is biased upward";
    else
        note << "ruin after horizon counted as survival; bias <= " << format_number(est.truncation_bound);
    if (model.sigma == 0.0)
        note << "; piecewise-deterministic scheme, no discretization";
    else
        note << "; Euler step dt = " << format_number(cfg.dt) << " * exp(" << format_number(cfg.dt_growth)
             << " q t) within reach of 0 and b, bridge-minimum reflection; check bias by halving dt";
    est.bias_note = note.str();
    if (paths) *paths = std::move(records);
    return est;
}

}  // namespace

PhaseTypeSampler::PhaseTypeSampler(const PhaseTypeLaw& law) : dim_(law.dim()) {
    const auto& alpha = law.alpha();
    const auto& t = law.subgen();
    const auto& exit = law.exit_rates();
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) {
        acc += alpha(i);
        start_cdf_.push_back(acc);
    }
    start_cdf_.push_back(1.0);
    for (int i = 0; i < dim_; ++i) {
        const double rate = -t(i, i);
        exit_rate_.push_back(rate);
        std::vector<double> row;
        double a = 0.0;
        int successors = 0;
        int last = -1;
        for (int j = 0; j < dim_; ++j) {
            if (j != i) a += t(i, j) / rate;
            if (j != i && t(i, j) > 0.0) {
                ++successors;
                last = j;
            }
            row.push_back(a);
        }
        a += exit(i) / rate;
        if (exit(i) > 0.0) {
            ++successors;
            last = dim_;
        }
        row.push_back(std::max(a, 1.0));
        cdf_.push_back(std::move(row));
        forced_.push_back(successors == 1 ? last : -1);
    }
}

double PhaseTypeSampler::operator()(std::mt19937_64& rng) const {
    const double u0 = uniform01(rng);
    int phase = static_cast<int>(std::lower_bound(start_cdf_.begin(), start_cdf_.end(), u0) - start_cdf_.begin());
    double z = 0.0;
    while (phase < dim_) {
        z += exponential(rng, exit_rate_[static_cast<std::size_t>(phase)]);
        const int forced = forced_[static_cast<std::size_t>(phase)];
        if (forced >= 0) {
            phase = forced;
            continue;
        }
        const auto& row = cdf_[static_cast<std::size_t>(phase)];
        const double u = uniform01(rng);
        phase = static_cast<int>(std::lower_bound(row.begin(), row.end(), u) - row.begin());
    }
    return z;
}

double truncation_bound(const ProblemParams& params, double horizon) {
    return params.delta / params.q * std::exp(-params.q * horizon);
}

double default_horizon(const ProblemParams& params, double tol) {
    return std::max(0.0, std::log(params.delta / (params.q * tol)) / params.q);
}

MCEstimate simulate_npv(const LevyModel& model, const ProblemParams& params, double b, double x0,
                        const SimConfig& cfg, std::vector<PathRecord>* paths) {
    return run_simulation(model, params, b, x0, cfg, Target::Npv, paths);
}

MCEstimate simulate_ruin_laplace(const LevyModel& model, const ProblemParams& params, double b, double x0,
                                 const SimConfig& cfg, std::vector<PathRecord>* paths) {
    return run_simulation(model, params, b, x0, cfg, Target::Ruin, paths);
}

KeyValues to_key_values(const MCEstimate& e) {
    return {
        {"mean", format_number(e.mean)},
        {"stderr", format_number(e.std_error)},
        {"n_paths", std::to_string(e.n_paths)},
        {"dt", format_number(e.dt)},
        {"horizon", format_number(e.horizon)},
        {"truncation_bound", format_number(e.truncation_bound)},
        {"bias_note", e.bias_note},
    };
}

void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& paths) {
    os << "path,discounted_dividends,discounted_injections,ruin_time\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        os << i << ',' << format_number(paths[i].dividends) << ',' << format_number(paths[i].injections) << ','
           << format_number(paths[i].ruin_time) << '\n';
    }
}

}  // namespace levydiv
