#pragma once

#include <complex>
#include <vector>

namespace levydiv {

using Complex = std::complex<double>;

/// One term coef * x^power * exp(rate * x).
struct ExpTerm {
    Complex coef;
    Complex rate;
    int power = 0;
};

/// Piecewise function on the real line: a finite sum of ExpTerms on x >= 0
/// and a real polynomial on x < 0. Scale functions and everything built
/// from them (antiderivatives, Z-type closures) live in this algebra.
///
/// The term list is kept closed under complex conjugation so the x >= 0
/// branch is real; evaluation returns the real part.
class ExpMixture {
public:
    ExpMixture() = default;
    explicit ExpMixture(std::vector<ExpTerm> terms, std::vector<double> below_zero = {});

    static ExpMixture constant(double value);
    static ExpMixture exponential(double coef, double rate);

    double operator()(double x) const;
    /// Right-branch value including the imaginary residue (diagnostics only).
    Complex evaluate_complex(double x) const;
    /// Left limit at x (x <= 0 uses the polynomial branch).
    double left_limit(double x) const;

    ExpMixture derivative() const;
    /// x -> integral_0^x of this function (valid for negative x as well).
    ExpMixture antiderivative() const;

    ExpMixture& operator+=(const ExpMixture& other);
    ExpMixture& operator*=(double k);
    ExpMixture plus_constant(double a) const;

    const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
    const std::vector<double>& below_zero() const noexcept { return below_; }
    int max_power() const noexcept;
    /// Largest real part among rates with non-zero coefficient (-inf if none).
    double max_real_rate() const noexcept;

private:
    void canonicalize();

    std::vector<ExpTerm> terms_;
    std::vector<double> below_;
};

ExpMixture operator+(ExpMixture a, const ExpMixture& b);
ExpMixture operator*(double k, ExpMixture m);

Complex expm1(Complex z);
/// expm1(z) / z, equal to 1 at z = 0.
Complex expm1_over(Complex z);

}  // namespace levydiv
