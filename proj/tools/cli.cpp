#include "cli.hpp"

#include <cmath>
#include <sstream>

#include <CLI11.hpp>

#include "levydiv/error.hpp"
#include "levydiv/model_file.hpp"
#include "levydiv/scale_engine.hpp"
#include "levydiv/simulator.hpp"
#include "levydiv/solver.hpp"
#include "levydiv/text_io.hpp"
#include "levydiv/verifier.hpp"

namespace levydiv::cli {

namespace {

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double number(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    input_error("'" + text + "' is not a number");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) {
        cur.erase(0, cur.find_first_not_of(" \t"));
        cur.erase(cur.find_last_not_of(" \t") + 1);
        out.push_back(cur);
    }
    return out;
}

bool is_input_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::BadParameters:
        case ErrorCode::BadPhaseType:
        case ErrorCode::MonotonePaths:
        case ErrorCode::DriftTooSmall:
            return true;
        default:
            return false;
    }
}

struct Options {
    std::string model;
    std::string out;
    std::string grid;
    std::string b_list;
    std::string sweep;
    std::string paths_csv;
    std::string grid_csv;
    std::string target = "npv";
    double b = -1.0;
    double x0 = 0.0;
    std::size_t paths = 100000;
    double dt = SimConfig{}.dt;
    std::uint64_t seed = SimConfig{}.seed;
    double horizon = 0.0;
    bool antithetic = false;
};

std::vector<double> grid_of(const std::string& text) {
    if (text.empty()) input_error("--grid a:b:step is required");
    const GridSpec g = parse_grid(text);
    return grid_points(g.lo, g.hi, g.step);
}

class Runner {
public:
    Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

    void emit(const std::string& content) const {
        if (o_.out.empty())
            out_ << content;
        else
            write_file_atomic(o_.out, content);
    }

    ModelSpec load() const {
        if (o_.model.empty()) input_error("--model is required");
        return load_model_file(o_.model);
    }

    int solve() const {
        const ModelSpec spec = load();
        const Solution sol = DividendProblem::validated(spec.model, spec.params).find_threshold();
        std::ostringstream os;
        write_key_values(os, to_key_values(sol));
        emit(os.str());
        return kOk;
    }

    int value() const {
        const ModelSpec spec = load();
        const auto xs = grid_of(o_.grid);
        const DividendProblem pr = DividendProblem::validated(spec.model, spec.params);
        const Solution sol = pr.find_threshold();
        std::vector<double> bs{sol.b_star};
        if (!o_.b_list.empty())
            for (double b : parse_list(o_.b_list)) {
                if (b < 0.0) input_error("--b-list entries must be >= 0");
                bs.push_back(b);
            }
        std::ostringstream os;
        os << "x";
        for (std::size_t i = 0; i < bs.size(); ++i) {
            const std::string tag = i == 0 ? "b*=" + format_number(bs[i]) : "b=" + format_number(bs[i]);
            os << ",v[" << tag << "],dv[" << tag << "]";
        }
        os << '\n';
        std::vector<ExpMixture> above, dabove;
        for (double b : bs) {
            above.push_back(pr.value_above(b));
            dabove.push_back(above.back().derivative());
        }
        for (double x : xs) {
            std::vector<double> row{x};
            for (std::size_t i = 0; i < bs.size(); ++i) {
                const double b = bs[i];
                row.push_back(x >= b ? above[i](x - b) : pr.value_at(b, x));
                row.push_back(x >= b ? dabove[i](x - b) : pr.value_derivative_at(b, x).right);
            }
            write_csv_row(os, row);
        }
        emit(os.str());
        return kOk;
    }

    int gcurve() const {
        const ModelSpec spec = load();
        auto bs = grid_of(o_.grid);
        if (bs.empty()) input_error("empty grid");
        if (bs.front() < 0.0) input_error("threshold grid must start at b >= 0");
        const DividendProblem pr = DividendProblem::validated(spec.model, spec.params);
        const Solution sol = pr.find_threshold();
        std::ostringstream os;
        os << "b,g,h,g_over_h,is_b_star\n";
        auto row = [&](double b, bool star) {
            write_csv_row(os, {b, pr.g_of_b(b), pr.h_of_b(b), pr.g_over_h(b), star ? 1.0 : 0.0});
        };
        bool placed = false;
        for (double b : bs) {
            if (!placed && sol.b_star <= b) {
                row(sol.b_star, true);
                placed = true;
                if (b == sol.b_star) continue;
            }
            row(b, false);
        }
        if (!placed) row(sol.b_star, true);
        emit(os.str());
        return kOk;
    }

    int sweep() const {
        const ModelSpec spec = load();
        if (o_.sweep.empty()) input_error("--sweep beta=... | delta=... is required");
        const SweepSpec sw = parse_sweep(o_.sweep);
        const auto xs = grid_of(o_.grid);
        std::ostringstream os;
        os << sw.name << ",b_star";
        for (double x : xs) os << ",v(" << format_number(x) << ")";
        os << '\n';
        for (double value : sw.values) {
            ProblemParams p = spec.params;
            (sw.name == "beta" ? p.beta : p.delta) = value;
            const DividendProblem pr = DividendProblem::validated(spec.model, p);
            const Solution sol = pr.find_threshold();
            const ExpMixture above = pr.value_above(sol.b_star);
            std::vector<double> row{value, sol.b_star};
            for (double x : xs) row.push_back(x >= sol.b_star ? above(x - sol.b_star) : pr.value_at(sol.b_star, x));
            write_csv_row(os, row);
        }
        emit(os.str());
        return kOk;
    }

    int simulate() const {
        const ModelSpec spec = load();
        if (o_.target != "npv" && o_.target != "ruin") input_error("--target must be npv or ruin");
        const DividendProblem pr = DividendProblem::validated(spec.model, spec.params);
        const double b = o_.b >= 0.0 ? o_.b : pr.find_threshold().b_star;
        SimConfig cfg;
        cfg.n_paths = o_.paths;
        cfg.dt = o_.dt;
        cfg.seed = o_.seed;
        cfg.horizon = o_.horizon;
        cfg.antithetic = o_.antithetic;
        std::vector<PathRecord> paths;
        std::vector<PathRecord>* sink = o_.paths_csv.empty() ? nullptr : &paths;
        const bool npv = o_.target == "npv";
        const MCEstimate est = npv ? simulate_npv(spec.model, spec.params, b, o_.x0, cfg, sink)
                                   : simulate_ruin_laplace(spec.model, spec.params, b, o_.x0, cfg, sink);
        const double analytic = npv ? pr.value_at(b, o_.x0) : pr.refracted_ruin_laplace(b, o_.x0);
        KeyValues kv{{"target", o_.target}, {"b", format_number(b)}, {"x0", format_number(o_.x0)},
                     {"seed", std::to_string(o_.seed)}};
        for (auto& item : to_key_values(est)) kv.push_back(item);
        kv.emplace_back("analytic", format_number(analytic));
        std::ostringstream os;
        write_key_values(os, kv);
        if (sink) {
            std::ostringstream ps;
            write_paths_csv(ps, paths);
            write_file_atomic(o_.paths_csv, ps.str());
        }
        emit(os.str());
        return kOk;
    }

    int verify() const {
        const ModelSpec spec = load();
        const DividendProblem pr = DividendProblem::validated(spec.model, spec.params);
        const double b = o_.b >= 0.0 ? o_.b : pr.find_threshold().b_star;
        const VerificationReport r = check_hjb(pr, b);
        std::ostringstream os;
        write_key_values(os, to_key_values(r));
        if (!o_.grid_csv.empty()) {
            std::ostringstream gs;
            write_grid_csv(gs, r);
            write_file_atomic(o_.grid_csv, gs.str());
        }
        emit(os.str());
        return r.pass ? kOk : kCheckFailed;
    }

    int scales() const {
        const ModelSpec spec = load();
        const GridSpec g = parse_grid(o_.grid.empty() ? "0:10:0.1" : o_.grid);
        const ScaleSet s = make_scale_set(spec.model, spec.params);
        std::ostringstream os;
        write_scale_csv(os, s, g.lo, g.hi, g.step);
        emit(os.str());
        return kOk;
    }

private:
    const Options& o_;
    std::ostream& out_;
};

}  // namespace

GridSpec parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) input_error("grid '" + text + "' is not a:b:step");
    GridSpec g{number(parts[0]), number(parts[1]), number(parts[2])};
    if (!(g.step > 0.0)) input_error("grid step must be > 0");
    if (g.hi < g.lo) input_error("grid '" + text + "' is empty");
    return g;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text, ','))
        if (!p.empty()) out.push_back(number(p));
    if (out.empty()) input_error("empty list '" + text + "'");
    return out;
}

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) input_error("sweep '" + text + "' is not name=values");
    SweepSpec s;
    s.name = text.substr(0, eq);
    if (s.name != "beta" && s.name != "delta") input_error("sweep parameter must be beta or delta");
    const std::string rest = text.substr(eq + 1);
    if (rest.find(':') != std::string::npos) {
        const GridSpec g = parse_grid(rest);
        s.values = grid_points(g.lo, g.hi, g.step);
    } else {
        s.values = parse_list(rest);
    }
    for (double v : s.values)
        if (!(v > 0.0)) input_error("sweep values must be positive");
    return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Refraction-reflection dividend strategies for Brownian plus phase-type models"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--model", o.model, "model file (key = value)")->required();
        c->add_option("--out", o.out, "output path (default stdout)");
    };
    auto grid = [&](CLI::App* c, const char* help) { c->add_option("--grid", o.grid, help); };
    auto sim = [&](CLI::App* c) {
        c->add_option("--paths", o.paths, "number of paths")->check(CLI::PositiveNumber);
        c->add_option("--dt", o.dt, "diffusion step near 0 and b")->check(CLI::PositiveNumber);
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--horizon", o.horizon, "time horizon (default: tail bound 1e-6)");
    };

    CLI::App* solve = app.add_subcommand("solve", "optimal threshold b*");
    common(solve);
    CLI::App* value = app.add_subcommand("value", "CSV of v_b and v_b' for b* and --b-list");
    common(value);
    grid(value, "x grid a:b:step");
    value->add_option("--b-list", o.b_list, "extra thresholds v1,v2,...");
    CLI::App* gcurve = app.add_subcommand("gcurve", "CSV of g, h and g/h over a threshold grid");
    common(gcurve);
    grid(gcurve, "b grid a:b:step");
    CLI::App* sweep = app.add_subcommand("sweep", "b* and v_{b*} across beta or delta");
    common(sweep);
    grid(sweep, "x grid a:b:step");
    sweep->add_option("--sweep", o.sweep, "beta=v1,v2,... or delta=a:b:step");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the NPV or ruin transform");
    common(simulate);
    sim(simulate);
    simulate->add_option("--x0", o.x0, "initial surplus")->check(CLI::NonNegativeNumber);
    simulate->add_option("--b", o.b, "threshold (default b*)")->check(CLI::NonNegativeNumber);
    simulate->add_option("--target", o.target, "npv | ruin");
    simulate->add_flag("--antithetic", o.antithetic, "antithetic Brownian increments");
    simulate->add_option("--paths-csv", o.paths_csv, "per-path CSV output");
    CLI::App* verify = app.add_subcommand("verify", "HJB and smooth-fit certification");
    common(verify);
    verify->add_option("--b", o.b, "threshold to certify (default b*)")->check(CLI::NonNegativeNumber);
    verify->add_option("--grid-csv", o.grid_csv, "per-grid-point CSV output");
    CLI::App* scales = app.add_subcommand("scales", "CSV dump of the scale functions");
    common(scales);
    grid(scales, "x grid a:b:step (default 0:10:0.1)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    const Runner r(o, out);
    try {
        if (*solve) return r.solve();
        if (*value) return r.value();
        if (*gcurve) return r.gcurve();
        if (*sweep) return r.sweep();
        if (*simulate) return r.simulate();
        if (*verify) return r.verify();
        if (*scales) return r.scales();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_input_error(e.code()) ? kInputError : kCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace levydiv::cli
