#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace levydiv {

using Complex = std::complex<double>;

/// Phase-type law of the (positive) jump size Z: absorption time of a CTMC
/// with initial distribution `alpha` and sub-generator `T`. A defect
/// 1 - sum(alpha) is an atom at Z = 0.
class PhaseTypeLaw {
public:
    PhaseTypeLaw(Eigen::VectorXd alpha, Eigen::MatrixXd subgen);

    static PhaseTypeLaw exponential(double rate);
    static PhaseTypeLaw hyperexponential(const std::vector<double>& weights,
                                         const std::vector<double>& rates);
    /// Two-moment Erlang(k-1)/Erlang(k) mixture approximating Weibull(shape 2, scale 1).
    static PhaseTypeLaw weibull2_erlang_mix();

    int dim() const noexcept { return static_cast<int>(alpha_.size()); }
    const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
    const Eigen::MatrixXd& subgen() const noexcept { return subgen_; }
    const Eigen::VectorXd& exit_rates() const noexcept { return exit_; }
    double mass() const noexcept { return mass_; }
    double mean() const noexcept { return mean_; }

    /// L_Z(theta) - 1 from the cached rational form K(theta) / D(theta).
    double transform_minus_one(double theta) const;
    Complex transform_minus_one(Complex theta) const;
    /// d/dtheta of L_Z.
    Complex transform_derivative(Complex theta) const;

    /// D(theta) = det(theta I - T), ascending coefficients, monic.
    const std::vector<double>& denominator() const noexcept { return den_; }
    /// K(theta) = alpha adj(theta I - T) t - mass * D(theta), ascending, K(0) = 0.
    const std::vector<double>& numerator() const noexcept { return num_; }

    /// Density alpha e^{T z} t of the non-degenerate part, z >= 0.
    double density(double z) const;
    /// P(Z > z) for z >= 0.
    double survival(double z) const;
    /// E[Z; Z > z] - z P(Z > z) = alpha e^{T z} (-T)^{-1} 1.
    double excess_mean(double z) const;

private:
    Eigen::VectorXd alpha_;
    Eigen::MatrixXd subgen_;
    Eigen::VectorXd exit_;
    Eigen::VectorXd neg_inv_ones_;  // (-T)^{-1} 1
    double mass_ = 0.0;
    double mean_ = 0.0;
    // Uniformization: e^{Tz} = sum_k Pois(k; lambda z) P^k with P = I + T / lambda.
    double unif_rate_ = 0.0;
    std::vector<double> unif_density_;   // alpha P^k t
    std::vector<double> unif_survival_;  // alpha P^k 1
    std::vector<double> unif_excess_;    // alpha P^k (-T)^{-1} 1
    double uniformized(const std::vector<double>& coeffs, double z) const;
    std::vector<double> den_;
    std::vector<double> num_;
};

/// X_t = c t + sigma B_t - (compound Poisson with rate kappa and jumps Z).
struct LevyModel {
    double c = 0.0;
    double sigma = 0.0;
    double kappa = 0.0;
    PhaseTypeLaw jumps = PhaseTypeLaw::exponential(1.0);

    bool has_jumps() const noexcept { return kappa > 0.0; }
    bool bounded_variation() const noexcept { return sigma == 0.0; }
    /// Y = X - delta t, same law otherwise.
    LevyModel refracted(double delta) const;
};

struct ProblemParams {
    double q = 0.05;
    double beta = 1.5;
    double delta = 1.0;
};

/// Throws Error(MonotonePaths | DriftTooSmall | BadParameters) on the first violated invariant.
void validate(const LevyModel& model, const ProblemParams& params);

double laplace_exponent(const LevyModel& model, double theta);
Complex laplace_exponent(const LevyModel& model, Complex theta);
Complex laplace_exponent_derivative(const LevyModel& model, Complex theta);
double laplace_exponent_refracted(const LevyModel& model, const ProblemParams& params, double theta);

/// psi'(0+) = E X_1.
double mean_rate(const LevyModel& model);

/// Largest root of psi(lambda) = q on (0, inf).
double phi_root(const LevyModel& model, double q);
/// Largest root of psi_Y(lambda) = q.
double varphi_root(const LevyModel& model, const ProblemParams& params, double q);

double jump_density(const LevyModel& model, double z);

}  // namespace levydiv
