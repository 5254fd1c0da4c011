#include "levydiv/exp_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levydiv/polynomial.hpp"

namespace levydiv {

namespace {

Complex ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

double falling(int n, int j) {  // n! / (n - j)!
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= n - i;
    return r;
}

}  // namespace

Complex expm1(Complex z) {
    const double a = z.real();
    const double b = z.imag();
    const double s = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

Complex expm1_over(Complex z) {
    if (std::abs(z) < 1e-5) return 1.0 + z * (0.5 + z / 6.0);
    return expm1(z) / z;
}

ExpMixture::ExpMixture(std::vector<ExpTerm> terms, std::vector<double> below_zero)
    : terms_(std::move(terms)), below_(std::move(below_zero)) {
    canonicalize();
}

ExpMixture ExpMixture::constant(double value) {
    return ExpMixture({ExpTerm{value, 0.0, 0}}, {value});
}

ExpMixture ExpMixture::exponential(double coef, double rate) {
    return ExpMixture({ExpTerm{coef, rate, 0}});
}

void ExpMixture::canonicalize() {
    std::vector<ExpTerm> merged;
    for (const ExpTerm& t : terms_) {
        if (t.coef == Complex(0.0)) continue;
        auto it = std::find_if(merged.begin(), merged.end(), [&](const ExpTerm& m) {
            return m.rate == t.rate && m.power == t.power;
        });
        if (it == merged.end()) merged.push_back(t); else it->coef += t.coef;
    }
    std::erase_if(merged, [](const ExpTerm& t) { return t.coef == Complex(0.0); });
    terms_ = std::move(merged);
    below_ = poly::trim(below_);
    if (below_.size() == 1 && below_[0] == 0.0) below_.clear();
}

Complex ExpMixture::evaluate_complex(double x) const {
    Complex s = 0.0;
    for (const ExpTerm& t : terms_) s += t.coef * ipow(x, t.power) * std::exp(t.rate * x);
    return s;
}

double ExpMixture::operator()(double x) const {
    if (x < 0.0) return poly::evaluate(below_, x);
    return evaluate_complex(x).real();
}

double ExpMixture::left_limit(double x) const {
    if (x <= 0.0) return poly::evaluate(below_, x);
    return evaluate_complex(x).real();
}

ExpMixture ExpMixture::derivative() const {
    std::vector<ExpTerm> out;
    out.reserve(2 * terms_.size());
    for (const ExpTerm& t : terms_) {
        if (t.rate != Complex(0.0)) out.push_back({t.coef * t.rate, t.rate, t.power});
        if (t.power > 0) out.push_back({t.coef * static_cast<double>(t.power), t.rate, t.power - 1});
    }
    return ExpMixture(std::move(out), below_.empty() ? below_ : poly::derivative(below_));
}

ExpMixture ExpMixture::antiderivative() const {
    std::vector<ExpTerm> out;
    Complex constant = 0.0;
    for (const ExpTerm& t : terms_) {
        const int p = t.power;
        if (t.rate == Complex(0.0)) {
            out.push_back({t.coef / static_cast<double>(p + 1), 0.0, p + 1});
            continue;
        }
        // int_0^x y^p e^{ry} dy = sum_j (-1)^j p!/(p-j)! x^{p-j} e^{rx} / r^{j+1} - (-1)^p p! / r^{p+1}
        Complex rpow = t.rate;
        for (int j = 0; j <= p; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            out.push_back({t.coef * sign * falling(p, j) / rpow, t.rate, p - j});
            if (j < p) rpow *= t.rate;
        }
        const double sign = (p % 2 == 0) ? 1.0 : -1.0;
        constant -= t.coef * sign * falling(p, p) / rpow;
    }
    out.push_back({constant, 0.0, 0});
    std::vector<double> below(below_.size() + 1, 0.0);
    for (std::size_t i = 0; i < below_.size(); ++i) below[i + 1] = below_[i] / static_cast<double>(i + 1);
    return ExpMixture(std::move(out), std::move(below));
}

ExpMixture& ExpMixture::operator+=(const ExpMixture& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    below_ = poly::add(below_, other.below_);
    canonicalize();
    return *this;
}

ExpMixture& ExpMixture::operator*=(double k) {
    for (ExpTerm& t : terms_) t.coef *= k;
    for (double& b : below_) b *= k;
    canonicalize();
    return *this;
}

ExpMixture ExpMixture::plus_constant(double a) const {
    ExpMixture r = *this;
    r += constant(a);
    return r;
}

int ExpMixture::max_power() const noexcept {
    int p = 0;
    for (const ExpTerm& t : terms_) p = std::max(p, t.power);
    return p;
}

double ExpMixture::max_real_rate() const noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (const ExpTerm& t : terms_) m = std::max(m, t.rate.real());
    return m;
}

ExpMixture operator+(ExpMixture a, const ExpMixture& b) {
    a += b;
    return a;
}

ExpMixture operator*(double k, ExpMixture m) {
    m *= k;
    return m;
}

}  // namespace levydiv
