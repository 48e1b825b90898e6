#pragma once

// Melnikov analysis for the splitting of the manifolds of the Lyapunov
// orbits near the two saddle-centers: B matrices, the quadratic form R and
// the zero structure of M(t0).

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hetmel/model.hpp"
#include "hetmel/ode.hpp"
#include "hetmel/special.hpp"

namespace hetmel {

// Psi(t) built from the analytic NVE solution: columns (Re eta, Re eta') and
// (Im eta, Im eta') / w-.
Eigen::Matrix2d fundamental_matrix_psi(double t, const ModelParams& p);
Eigen::Matrix2d fundamental_matrix_psi(double t, const ModelParams& p, const HypergeomParams& hp,
                                       const ConnectionData& cd);

// Rotation-like fundamental matrix of the constant-coefficient NVE at a saddle.
Eigen::Matrix2d phi_matrix(double t, const ModelParams& p, Side which);
Eigen::Matrix2d phi_matrix(double t, double omega_pm);

struct BMatrices {
    Eigen::Matrix2d b_minus;
    Eigen::Matrix2d b_plus;
    Eigen::Matrix2d b0;  // b_plus * b_minus^{-1}
};

inline constexpr double kDefaultTLimit = 40.0;
inline constexpr double kTLimitCheckOffset = 5.0;
inline constexpr double kBLimitAgreement = 1e-6;

// B-+ = Phi-+(-t) Psi(t) at t = -+t_limit, Psi integrated numerically from
// its analytic value at t = 0. Samples at t_limit and t_limit + 5 must agree
// to 1e-6 or NumericalError is thrown.
BMatrices b_matrices_numeric(const ModelParams& p, double t_limit = kDefaultTLimit,
                             const IntegratorConfig& cfg = IntegratorConfig::analysis());

Eigen::Matrix2d b0_analytic(const ModelParams& p);
Eigen::Matrix2d b0_analytic(const ModelParams& p, const ConnectionData& cd);

enum class ZeroStructure { SimpleZero, NoZero, DoubleZeros, IdenticallyZero };
std::string to_string(ZeroStructure z);

struct MelnikovReport {
    Eigen::Matrix2d b0;
    Eigen::Matrix2d r_matrix;
    double det_r = 0.0;
    double det_r_closed = 0.0;  // closed formula in the entries of B0
    double tr_r = 0.0;
    double g_value = 0.0;
    double phi0 = 0.0;
    ZeroStructure classification = ZeroStructure::NoZero;
};

inline constexpr double kZeroTolerance = 1e-9;

// Uses the closed-form B0; D+- = diag(w+-^2, 1).
MelnikovReport r_matrix_and_classification(const ModelParams& p);
MelnikovReport r_matrix_and_classification(const ModelParams& p, const Eigen::Matrix2d& b0);

ZeroStructure classify_zero_structure(const Eigen::Matrix2d& r);

double melnikov_phase(const ModelParams& p);
double melnikov_closed_form(double t0, const ModelParams& p);

// m-(eta0) - m+(B0 Phi-(t0) eta0) with numerically computed B0.
double melnikov_direct(double t0, const Eigen::Vector2d& eta0, const ModelParams& p,
                       const IntegratorConfig& cfg = IntegratorConfig::analysis(), double t_limit = kDefaultTLimit);
double melnikov_direct(double t0, const Eigen::Vector2d& eta0, const ModelParams& p, const BMatrices& b);

double g_function(const ModelParams& p);

// Magnitude of the two terms of G, used to scale residuals.
double g_scale(const ModelParams& p);

struct GRoot {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double residual = 0.0;  // |G| at the root
    double scale = 0.0;
};

// First sign change of G(., beta2, omega) scanning beta1 upward from 0,
// refined by bisection. Throws NumericalError when no sign change exists.
GRoot g_zero(double omega, double beta2);

struct GCurve {
    std::vector<GRoot> points;
    std::vector<double> skipped_beta2;
};

GCurve trace_g_zero_curve(double omega, double beta2_min, double beta2_max, int n_points);

}  // namespace hetmel
