#include "levydiv/scale_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/Polynomials>

#include "levydiv/error.hpp"
#include "levydiv/polynomial.hpp"
#include "levydiv/text_io.hpp"

namespace levydiv {

namespace {

constexpr double kRepeatGap = 1e-7;

Complex polish(const LevyModel& model, double q, Complex root) {
    for (int it = 0; it < 8; ++it) {
        const Complex f = laplace_exponent(model, root) - q;
        const Complex df = laplace_exponent_derivative(model, root);
        if (df == Complex(0.0)) break;
        const Complex step = f / df;
        root -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(root))) break;
    }
    return root;
}

}  // namespace

std::vector<double> cleared_polynomial(const LevyModel& model, double q) {
    std::vector<double> gauss{-q, model.c, 0.5 * model.sigma * model.sigma};
    if (!model.has_jumps()) return poly::trim(gauss);
    const auto& law = model.jumps;
    auto p = poly::add(poly::multiply(law.denominator(), gauss), poly::scale(law.numerator(), model.kappa));
    return poly::trim(p);
}

std::vector<Complex> psi_roots(const LevyModel& model, double q) {
    if (!(q > 0.0)) throw Error(ErrorCode::BadParameters, "q must be > 0");
    const auto p = cleared_polynomial(model, q);
    if (p.size() < 2) throw Error(ErrorCode::NoConvergence, "psi - q is constant");

    std::vector<Complex> raw;
    if (p.size() == 2) {
        raw.push_back(-p[0] / p[1]);
    } else {
        Eigen::VectorXd coeffs(static_cast<Eigen::Index>(p.size()));
        for (std::size_t i = 0; i < p.size(); ++i) coeffs(static_cast<Eigen::Index>(i)) = p[i];
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i) raw.push_back(solver.roots()(i));
    }

    std::vector<Complex> roots;
    for (Complex r : raw) {
        // Spurious roots shared with det(theta I - T) are poles of psi, not zeros of psi - q.
        if (model.has_jumps()) {
            const Complex d = poly::evaluate(model.jumps.denominator(), r);
            const double scale = std::pow(std::max(1.0, std::abs(r)), model.jumps.dim());
            if (std::abs(d) <= 1e-8 * scale) continue;
        }
        r = polish(model, q, r);
        if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r))) r = {r.real(), 0.0};
        roots.push_back(r);
    }

    // Conjugate closure: keep upper half-plane roots and mirror them.
    std::vector<Complex> closed;
    for (const Complex& r : roots)
        if (r.imag() == 0.0) closed.push_back(r);
    for (const Complex& r : roots)
        if (r.imag() > 0.0) {
            closed.push_back(r);
            closed.push_back(std::conj(r));
        }
    if (closed.size() != roots.size()) {
        std::ostringstream os;
        os << "complex roots are not conjugate-paired (" << roots.size() << " roots, " << closed.size()
           << " after pairing)";
        throw Error(ErrorCode::NoConvergence, os.str());
    }

    for (std::size_t i = 0; i < closed.size(); ++i)
        for (std::size_t j = i + 1; j < closed.size(); ++j)
            if (std::abs(closed[i] - closed[j]) < kRepeatGap) {
                std::ostringstream os;
                os << "roots " << closed[i] << " and " << closed[j]
                   << " coincide within 1e-7; perturb q by about 1e-9 and retry";
                throw Error(ErrorCode::RepeatedRoots, os.str());
            }

    std::sort(closed.begin(), closed.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    if (closed.empty() || closed.front().imag() != 0.0 || !(closed.front().real() > 0.0))
        throw Error(ErrorCode::NoConvergence, "no positive real root of psi - q");
    const double phi = phi_root(model, q);
    if (std::abs(closed.front().real() - phi) > 1e-8 * std::max(1.0, phi))
        throw Error(ErrorCode::NoConvergence, "companion-matrix root disagrees with bisection root");
    closed.front() = phi;
    return closed;
}

std::vector<Complex> psi_roots(const LevyModel& model, const ProblemParams& params, bool refracted) {
    return psi_roots(refracted ? model.refracted(params.delta) : model, params.q);
}

ExpMixture build_W(const LevyModel& model, double q) {
    std::vector<ExpTerm> terms;
    for (const Complex& r : psi_roots(model, q))
        terms.push_back({1.0 / laplace_exponent_derivative(model, r), r, 0});
    return ExpMixture(std::move(terms));
}

ExpMixture build_W(const LevyModel& model, const ProblemParams& params, bool refracted) {
    return build_W(refracted ? model.refracted(params.delta) : model, params.q);
}

ExpMixture make_Z(const ExpMixture& W, double q) {
    return (q * W.antiderivative()).plus_constant(1.0);
}

ExpMixture make_Zbar(const ExpMixture& Z) { return Z.antiderivative(); }

double weighted_tail_integral(const ExpMixture& m, double s, double b) {
    Complex total = 0.0;
    for (const ExpTerm& t : m.terms()) {
        const Complex gap = s - t.rate;
        if (!(gap.real() > 0.0)) {
            std::ostringstream os;
            os << "decay rate " << s << " does not dominate term rate " << t.rate;
            throw Error(ErrorCode::DivergentTail, os.str());
        }
        // int_0^inf e^{-gap y} (y + b)^p dy = sum_j C(p,j) b^{p-j} j! / gap^{j+1}
        Complex inner = 0.0;
        Complex gpow = gap;
        double binom = 1.0;
        double fact = 1.0;
        for (int j = 0; j <= t.power; ++j) {
            if (j > 0) {
                binom *= static_cast<double>(t.power - j + 1) / j;
                fact *= j;
                gpow *= gap;
            }
            inner += binom * std::pow(b, t.power - j) * fact / gpow;
        }
        total += t.coef * std::exp(t.rate * b) * inner;
    }
    return total.real();
}

double convolve_segment(const ExpMixture& A, const ExpMixture& B, double b, double x) {
    if (!(x > b)) return 0.0;
    if (A.max_power() > 0 || B.max_power() > 0)
        throw Error(ErrorCode::BadParameters, "convolve_segment supports power-0 terms only");
    const double len = x - b;
    Complex total = 0.0;
    for (const ExpTerm& ta : A.terms())
        for (const ExpTerm& tb : B.terms()) {
            // int_0^len e^{rA (len - u) + rB (b + u)} du, factored around the dominant exponent.
            const Complex d = tb.rate - ta.rate;
            const Complex seg = d.real() <= 0.0 ? std::exp(ta.rate * len + tb.rate * b) * expm1_over(d * len)
                                                : std::exp(tb.rate * x) * expm1_over(-d * len);
            total += ta.coef * tb.coef * len * seg;
        }
    return total.real();
}

ExpMixture shift_mixture(const ExpMixture& m, double b) {
    std::vector<ExpTerm> out;
    for (const ExpTerm& t : m.terms()) {
        const Complex base = t.coef * std::exp(t.rate * b);
        double binom = 1.0;
        for (int j = 0; j <= t.power; ++j) {
            out.push_back({base * binom * std::pow(b, t.power - j), t.rate, j});
            binom = binom * (t.power - j) / (j + 1);
        }
    }
    return ExpMixture(std::move(out));
}

ExpMixture convolve_mixture(const ExpMixture& A, const ExpMixture& B, double b) {
    if (A.max_power() > 0 || B.max_power() > 0)
        throw Error(ErrorCode::BadParameters, "convolve_mixture supports power-0 terms only");
    std::vector<ExpTerm> out;
    for (const ExpTerm& ta : A.terms())
        for (const ExpTerm& tb : B.terms()) {
            const Complex k = ta.coef * tb.coef * std::exp(tb.rate * b);
            const Complex d = tb.rate - ta.rate;
            if (std::abs(d) <= 1e-12 * (1.0 + std::abs(ta.rate))) {
                out.push_back({k, ta.rate, 1});
            } else {
                out.push_back({k / d, tb.rate, 0});
                out.push_back({-k / d, ta.rate, 0});
            }
        }
    return ExpMixture(std::move(out));
}

ScaleSet make_scale_set(const LevyModel& model, const ProblemParams& params) {
    ScaleSet s;
    s.q = params.q;
    const LevyModel y = model.refracted(params.delta);
    s.W = build_W(model, params.q);
    s.Wbar = s.W.antiderivative();
    s.Z = make_Z(s.W, params.q);
    s.Zbar = make_Zbar(s.Z);
    s.WY = build_W(y, params.q);
    s.WYbar = s.WY.antiderivative();
    s.ZY = make_Z(s.WY, params.q);
    s.ZYbar = make_Zbar(s.ZY);
    s.dW = s.W.derivative();
    s.d2W = s.dW.derivative();
    s.dWY = s.WY.derivative();
    s.d2WY = s.dWY.derivative();
    s.phi_q = phi_root(model, params.q);
    s.varphi_q = phi_root(y, params.q);
    return s;
}

void write_scale_csv(std::ostream& os, const ScaleSet& s, double x_min, double x_max, double step) {
    os << "x,W,Wbar,Z,Zbar,WY,WYbar,ZY,ZYbar\n";
    for (double x : grid_points(x_min, x_max, step)) {
        write_csv_row(os, {x, s.W(x), s.Wbar(x), s.Z(x), s.Zbar(x), s.WY(x), s.WYbar(x), s.ZY(x), s.ZYbar(x)});
    }
}

}  // namespace levydiv
