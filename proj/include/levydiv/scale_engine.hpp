#pragma once

#include <iosfwd>
#include <vector>

#include "levydiv/exp_mixture.hpp"
#include "levydiv/levy_model.hpp"

namespace levydiv {

/// Roots of det(theta I - T) (psi(theta) - q) after cancelling poles of psi,
/// Newton-polished against the rational psi - q and closed under conjugation.
/// The largest real root (Phi(q)) is returned first.
/// Throws Error(RepeatedRoots) if two roots are closer than 1e-7.
std::vector<Complex> psi_roots(const LevyModel& model, double q);
std::vector<Complex> psi_roots(const LevyModel& model, const ProblemParams& params, bool refracted);

/// Cleared-denominator polynomial det(theta I - T) (psi(theta) - q), ascending.
std::vector<double> cleared_polynomial(const LevyModel& model, double q);

/// q-scale function W^(q) = sum_i e^{rho_i x} / psi'(rho_i) (zero on x < 0).
ExpMixture build_W(const LevyModel& model, double q);
ExpMixture build_W(const LevyModel& model, const ProblemParams& params, bool refracted);

/// Z = 1 + q * antiderivative(W); equals 1 on x <= 0.
ExpMixture make_Z(const ExpMixture& W, double q);
/// Zbar = antiderivative(Z); equals x on x <= 0.
ExpMixture make_Zbar(const ExpMixture& Z);

/// integral_0^inf e^{-s y} m(y + b) dy for b >= 0, in closed form.
/// Throws Error(DivergentTail) unless s exceeds every rate's real part.
double weighted_tail_integral(const ExpMixture& m, double s, double b);

/// integral_b^x A(x - y) B(y) dy over power-0 terms (0 when x <= b).
double convolve_segment(const ExpMixture& A, const ExpMixture& B, double b, double x);

/// u -> m(b + u) on u >= 0.
ExpMixture shift_mixture(const ExpMixture& m, double b);
/// u -> convolve_segment(A, B, b, b + u) as a mixture in u.
ExpMixture convolve_mixture(const ExpMixture& A, const ExpMixture& B, double b);

/// Scale functions of X and of Y = X - delta t, with their primitives and
/// the first two derivatives of W and WY.
struct ScaleSet {
    ExpMixture W, Wbar, Z, Zbar;
    ExpMixture WY, WYbar, ZY, ZYbar;
    ExpMixture dW, d2W, dWY, d2WY;
    double phi_q = 0.0;
    double varphi_q = 0.0;
    double q = 0.0;
};

ScaleSet make_scale_set(const LevyModel& model, const ProblemParams& params);

/// CSV with columns x, W, Wbar, Z, Zbar, WY, WYbar, ZY, ZYbar.
void write_scale_csv(std::ostream& os, const ScaleSet& s, double x_min, double x_max, double step);

}  // namespace levydiv
