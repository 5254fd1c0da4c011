#include "levydiv/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "levydiv/error.hpp"
#include "levydiv/polynomial.hpp"

namespace levydiv {

namespace {

constexpr double kStructTol = 1e-12;
// Enough Poisson terms for lambda z up to ~500.
constexpr int kUniformizationTerms = 800;
constexpr double kUniformizationMax = 500.0;

[[noreturn]] void bad_phase_type(const std::string& why) {
    throw Error(ErrorCode::BadPhaseType, why);
}

bool is_diagonal(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0.0) return false;
    return true;
}

template <typename S>
S psi_impl(const LevyModel& m, S theta) {
    S value = m.c * theta + 0.5 * m.sigma * m.sigma * theta * theta;
    if (m.has_jumps()) value += m.kappa * m.jumps.transform_minus_one(theta);
    return value;
}

double find_root(const LevyModel& model, double q) {
    if (!(q > 0.0)) throw Error(ErrorCode::BadParameters, "root search requires q > 0");
    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (laplace_exponent(model, hi) <= q) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200)
            throw Error(ErrorCode::NoConvergence, "psi(theta) - q has no positive root (monotone paths?)");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (laplace_exponent(model, mid) <= q) lo = mid; else hi = mid;
    }
    double root = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const double slope = laplace_exponent_derivative(model, Complex(root, 0.0)).real();
        if (!(slope > 0.0)) break;
        const double next = root - (laplace_exponent(model, root) - q) / slope;
        if (std::isfinite(next) && next > 0.0) root = next;
    }
    return root;
}

}  // namespace

PhaseTypeLaw::PhaseTypeLaw(Eigen::VectorXd alpha, Eigen::MatrixXd subgen)
    : alpha_(std::move(alpha)), subgen_(std::move(subgen)) {
    const Eigen::Index n = alpha_.size();
    if (n < 1) bad_phase_type("dimension must be positive");
    if (subgen_.rows() != n || subgen_.cols() != n) {
        std::ostringstream os;
        os << "sub-generator is " << subgen_.rows() << "x" << subgen_.cols() << ", expected " << n << "x" << n;
        bad_phase_type(os.str());
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(alpha_(i) >= 0.0)) bad_phase_type("alpha entries must be >= 0");
    mass_ = alpha_.sum();
    if (mass_ > 1.0 + kStructTol) bad_phase_type("sum(alpha) must be <= 1");
    bool some_exit = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(subgen_(i, i) < 0.0)) bad_phase_type("sub-generator diagonal must be < 0");
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && !(subgen_(i, j) >= 0.0)) bad_phase_type("sub-generator off-diagonal must be >= 0");
        const double row = subgen_.row(i).sum();
        if (row > kStructTol * std::abs(subgen_(i, i))) bad_phase_type("sub-generator row sums must be <= 0");
        if (row < 0.0) some_exit = true;
    }
    if (!some_exit) bad_phase_type("at least one phase must exit");

    exit_ = -subgen_ * Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) exit_(i) = std::max(exit_(i), 0.0);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(-subgen_);
    if (!lu.isInvertible()) bad_phase_type("sub-generator is singular (phases without absorption)");
    neg_inv_ones_ = lu.solve(Eigen::VectorXd::Ones(n));
    if (!neg_inv_ones_.allFinite() || neg_inv_ones_.minCoeff() < 0.0)
        bad_phase_type("sub-generator is not transient");
    mean_ = alpha_.dot(neg_inv_ones_);

    // Faddeev-LeVerrier: det(theta I - T) and alpha adj(theta I - T) t as polynomials.
    std::vector<double> den(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> adj(static_cast<std::size_t>(n), 0.0);
    den[static_cast<std::size_t>(n)] = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = subgen_ * m + den[static_cast<std::size_t>(n - k + 1)] * id;
        adj[static_cast<std::size_t>(n - k)] = alpha_.dot(m * exit_);
        den[static_cast<std::size_t>(n - k)] = -(subgen_ * m).trace() / static_cast<double>(k);
    }
    den_ = den;
    num_ = poly::add(adj, poly::scale(den, -mass_));
    num_[0] = 0.0;  // L_Z(0) - 1 vanishes identically

    unif_rate_ = (-subgen_.diagonal()).maxCoeff();
    const Eigen::MatrixXd step = id + subgen_ / unif_rate_;
    Eigen::RowVectorXd row = alpha_.transpose();
    for (int k = 0; k < kUniformizationTerms; ++k) {
        unif_density_.push_back(row.dot(exit_));
        unif_survival_.push_back(row.sum());
        unif_excess_.push_back(row.dot(neg_inv_ones_));
        row = row * step;
    }
}

double PhaseTypeLaw::uniformized(const std::vector<double>& coeffs, double z) const {
    const double lz = unif_rate_ * z;
    double weight = std::exp(-lz);
    double sum = weight * coeffs[0];
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        weight *= lz / static_cast<double>(k);
        sum += weight * coeffs[k];
        if (static_cast<double>(k) > lz && weight < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

PhaseTypeLaw PhaseTypeLaw::exponential(double rate) {
    if (!(rate > 0.0)) bad_phase_type("exponential rate must be > 0");
    return PhaseTypeLaw(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, -rate));
}

PhaseTypeLaw PhaseTypeLaw::hyperexponential(const std::vector<double>& weights,
                                            const std::vector<double>& rates) {
    if (weights.size() != rates.size() || weights.empty())
        bad_phase_type("hyperexponential needs matching non-empty weight and rate lists");
    const auto n = static_cast<Eigen::Index>(weights.size());
    Eigen::VectorXd alpha(n);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(rates[static_cast<std::size_t>(i)] > 0.0)) bad_phase_type("hyperexponential rates must be > 0");
        alpha(i) = weights[static_cast<std::size_t>(i)];
        t(i, i) = -rates[static_cast<std::size_t>(i)];
    }
    return PhaseTypeLaw(alpha, t);
}

PhaseTypeLaw PhaseTypeLaw::weibull2_erlang_mix() {
    // Match mean Gamma(3/2) and second moment Gamma(2) = 1 with an
    // Erlang(k-1, mu) / Erlang(k, mu) mixture, k chosen from the squared CV.
    const double mean = std::sqrt(M_PI) / 2.0;
    const double cv2 = 1.0 / (mean * mean) - 1.0;
    const int k = static_cast<int>(std::ceil(1.0 / cv2));
    const double kd = k;
    const double p = (kd * cv2 - std::sqrt(kd * (1.0 + cv2) - kd * kd * cv2)) / (1.0 + cv2);
    const double mu = (kd - p) / mean;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(k);
    alpha(0) = 1.0 - p;
    alpha(1) = p;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        t(i, i) = -mu;
        if (i + 1 < k) t(i, i + 1) = mu;
    }
    return PhaseTypeLaw(alpha, t);
}

double PhaseTypeLaw::transform_minus_one(double theta) const {
    const double d = poly::evaluate(den_, theta);
    if (d == 0.0) throw Error(ErrorCode::PoleHit, "theta is an eigenvalue of the sub-generator");
    return poly::evaluate(num_, theta) / d;
}

Complex PhaseTypeLaw::transform_minus_one(Complex theta) const {
    const Complex d = poly::evaluate(den_, theta);
    const double scale = std::pow(std::max(1.0, std::abs(theta)), static_cast<double>(dim()));
    if (std::abs(d) <= 1e-14 * scale) throw Error(ErrorCode::PoleHit, "theta is an eigenvalue of the sub-generator");
    return poly::evaluate(num_, theta) / d;
}

Complex PhaseTypeLaw::transform_derivative(Complex theta) const {
    const Complex d = poly::evaluate(den_, theta);
    const double scale = std::pow(std::max(1.0, std::abs(theta)), static_cast<double>(dim()));
    if (std::abs(d) <= 1e-14 * scale) throw Error(ErrorCode::PoleHit, "theta is an eigenvalue of the sub-generator");
    const Complex k = poly::evaluate(num_, theta);
    const Complex dk = poly::evaluate(poly::derivative(num_), theta);
    const Complex dd = poly::evaluate(poly::derivative(den_), theta);
    return (dk * d - k * dd) / (d * d);
}

double PhaseTypeLaw::density(double z) const {
    if (z < 0.0) return 0.0;
    if (is_diagonal(subgen_)) {
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) s += alpha_(i) * exit_(i) * std::exp(subgen_(i, i) * z);
        return s;
    }
    if (unif_rate_ * z <= kUniformizationMax) return uniformized(unif_density_, z);
    const Eigen::MatrixXd e = (subgen_ * z).exp();
    return alpha_.dot(e * exit_);
}

double PhaseTypeLaw::survival(double z) const {
    if (z <= 0.0) return mass_;
    if (is_diagonal(subgen_)) {
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) s += alpha_(i) * std::exp(subgen_(i, i) * z);
        return s;
    }
    if (unif_rate_ * z <= kUniformizationMax) return uniformized(unif_survival_, z);
    const Eigen::MatrixXd e = (subgen_ * z).exp();
    return alpha_.dot(e * Eigen::VectorXd::Ones(dim()));
}

double PhaseTypeLaw::excess_mean(double z) const {
    if (z <= 0.0) return mean_;
    if (unif_rate_ * z <= kUniformizationMax) return uniformized(unif_excess_, z);
    const Eigen::MatrixXd e = (subgen_ * z).exp();
    return alpha_.dot(e * neg_inv_ones_);
}

LevyModel LevyModel::refracted(double delta) const {
    LevyModel y = *this;
    y.c -= delta;
    return y;
}

void validate(const LevyModel& model, const ProblemParams& params) {
    if (!(params.q > 0.0)) throw Error(ErrorCode::BadParameters, "q must be > 0");
    if (!(params.beta > 1.0)) throw Error(ErrorCode::BadParameters, "beta must be > 1");
    if (!(params.delta > 0.0)) throw Error(ErrorCode::BadParameters, "delta must be > 0");
    if (!(model.sigma >= 0.0)) throw Error(ErrorCode::BadParameters, "sigma must be >= 0");
    if (!(model.kappa >= 0.0)) throw Error(ErrorCode::BadParameters, "kappa must be >= 0");
    if (!std::isfinite(model.c)) throw Error(ErrorCode::BadParameters, "c must be finite");
    if (model.sigma == 0.0) {
        if (model.kappa == 0.0 || model.jumps.mass() == 0.0)
            throw Error(ErrorCode::MonotonePaths, "sigma = 0 and no jumps gives monotone paths");
        if (!(model.c > 0.0)) throw Error(ErrorCode::MonotonePaths, "sigma = 0 requires c > 0");
        if (!(model.c > params.delta)) {
            std::ostringstream os;
            os << "bounded variation requires c > delta (c = " << model.c << ", delta = " << params.delta << ")";
            throw Error(ErrorCode::DriftTooSmall, os.str());
        }
    }
}

double laplace_exponent(const LevyModel& model, double theta) { return psi_impl(model, theta); }

Complex laplace_exponent(const LevyModel& model, Complex theta) { return psi_impl(model, theta); }

Complex laplace_exponent_derivative(const LevyModel& model, Complex theta) {
    Complex d = model.c + model.sigma * model.sigma * theta;
    if (model.has_jumps()) d += model.kappa * model.jumps.transform_derivative(theta);
    return d;
}

double laplace_exponent_refracted(const LevyModel& model, const ProblemParams& params, double theta) {
    return laplace_exponent(model, theta) - params.delta * theta;
}

double mean_rate(const LevyModel& model) {
    return model.has_jumps() ? model.c - model.kappa * model.jumps.mean() : model.c;
}

double phi_root(const LevyModel& model, double q) { return find_root(model, q); }

double varphi_root(const LevyModel& model, const ProblemParams& params, double q) {
    return find_root(model.refracted(params.delta), q);
}

double jump_density(const LevyModel& model, double z) { return model.jumps.density(z); }

}  // namespace levydiv
