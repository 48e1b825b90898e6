#include "hetmel/melnikov.hpp"

#include <cmath>
#include <sstream>

#include "hetmel/errors.hpp"
#include "hetmel/sweep.hpp"

namespace hetmel {

Eigen::Matrix2d fundamental_matrix_psi(double t, const ModelParams& p, const HypergeomParams& hp,
                                       const ConnectionData& cd) {
    const double wm = center_frequency(p, Side::Left);
    const auto eta = nve_solution_analytic(t, hp, cd);
    Eigen::Matrix2d psi;
    psi << eta.value.real(), eta.value.imag() / wm, eta.derivative.real(), eta.derivative.imag() / wm;
    return psi;
}

Eigen::Matrix2d fundamental_matrix_psi(double t, const ModelParams& p) {
    const auto hp = hypergeom_params(p);
    return fundamental_matrix_psi(t, p, hp, connection_coefficients(hp));
}

Eigen::Matrix2d phi_matrix(double t, double w) {
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    Eigen::Matrix2d m;
    m << c, s / w, -w * s, c;
    return m;
}

Eigen::Matrix2d phi_matrix(double t, const ModelParams& p, Side which) {
    return phi_matrix(t, center_frequency(p, which));
}

BMatrices b_matrices_numeric(const ModelParams& p, double t_limit, const IntegratorConfig& cfg) {
    if (!(t_limit > 0.0) || !std::isfinite(t_limit)) throw ParameterError("t_limit must be positive and finite");
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    const Eigen::Matrix2d psi0 = fundamental_matrix_psi(0.0, p);
    const double t_far = t_limit + kTLimitCheckOffset;

    const auto back = integrate_with_nve(psi0, {0.0, -t_far}, Branch::Plus, p, cfg);
    const auto fwd = integrate_with_nve(psi0, {0.0, t_far}, Branch::Plus, p, cfg);

    auto b_minus_at = [&](double T) { return Eigen::Matrix2d(phi_matrix(T, wm) * unpack_eta(back.interpolate(-T))); };
    auto b_plus_at = [&](double T) { return Eigen::Matrix2d(phi_matrix(-T, wp) * unpack_eta(fwd.interpolate(T))); };

    BMatrices out;
    out.b_minus = b_minus_at(t_limit);
    out.b_plus = b_plus_at(t_limit);
    const Eigen::Matrix2d bm_far = b_minus_at(t_far);
    const Eigen::Matrix2d bp_far = b_plus_at(t_far);
    const double dm = (out.b_minus - bm_far).cwiseAbs().maxCoeff();
    const double dp = (out.b_plus - bp_far).cwiseAbs().maxCoeff();
    if (dm > kBLimitAgreement || dp > kBLimitAgreement) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "B limits not converged at t_limit=" << t_limit << ": B- samples differ by " << dm
            << ", B+ samples differ by " << dp << "; B+(" << t_limit << ")=[" << out.b_plus.reshaped().transpose()
            << "] B+(" << t_far << ")=[" << bp_far.reshaped().transpose() << "]";
        throw NumericalError(msg.str());
    }
    out.b0 = out.b_plus * out.b_minus.inverse();
    return out;
}

Eigen::Matrix2d b0_analytic(const ModelParams& p, const ConnectionData& cd) {
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    const double p1 = cd.l12.real(), q1 = cd.l12.imag();
    const double p2 = cd.l22.real(), q2 = cd.l22.imag();
    Eigen::Matrix2d b;
    b << p1 + p2, (q1 + q2) / wm, wp * (q2 - q1), wp * (p1 - p2) / wm;
    return b;
}

Eigen::Matrix2d b0_analytic(const ModelParams& p) { return b0_analytic(p, connection_coefficients(hypergeom_params(p))); }

std::string to_string(ZeroStructure z) {
    switch (z) {
        case ZeroStructure::SimpleZero: return "SimpleZero";
        case ZeroStructure::NoZero: return "NoZero";
        case ZeroStructure::DoubleZeros: return "DoubleZeros";
        case ZeroStructure::IdenticallyZero: return "IdenticallyZero";
    }
    return "?";
}

ZeroStructure classify_zero_structure(const Eigen::Matrix2d& r) {
    const double norm = r.norm();
    const double det = r.determinant();
    const double tr = r.trace();
    if (std::abs(det) < kZeroTolerance * (1.0 + norm * norm)) {
        return std::abs(tr) < kZeroTolerance * (1.0 + norm) ? ZeroStructure::IdenticallyZero
                                                            : ZeroStructure::DoubleZeros;
    }
    return det < 0.0 ? ZeroStructure::SimpleZero : ZeroStructure::NoZero;
}

MelnikovReport r_matrix_and_classification(const ModelParams& p, const Eigen::Matrix2d& b0) {
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    // D+- = D_y^2 H(x+-, 0) in (eta1, eta2) order
    const double s1p = wp * wp, s2p = 1.0;
    const double s1m = wm * wm, s2m = 1.0;
    const Eigen::Matrix2d dp = Eigen::Vector2d(s1p, s2p).asDiagonal();
    const Eigen::Matrix2d dm = Eigen::Vector2d(s1m, s2m).asDiagonal();

    MelnikovReport rep;
    rep.b0 = b0;
    rep.r_matrix = dm - b0.transpose() * dp * b0;
    rep.r_matrix = 0.5 * (rep.r_matrix + rep.r_matrix.transpose()).eval();
    rep.det_r = rep.r_matrix.determinant();
    rep.tr_r = rep.r_matrix.trace();

    const double b11 = b0(0, 0), b12 = b0(0, 1), b21 = b0(1, 0), b22 = b0(1, 1);
    const double u = b11 * std::sqrt(s1p * s2m) - b22 * std::sqrt(s2p * s1m);
    const double v = b12 * std::sqrt(s1p * s1m) + b21 * std::sqrt(s2p * s2m);
    rep.det_r_closed = (wp - wm) * (wp - wm) - u * u - v * v;

    rep.g_value = g_function(p);
    rep.phi0 = melnikov_phase(p);
    rep.classification = classify_zero_structure(rep.r_matrix);
    return rep;
}

MelnikovReport r_matrix_and_classification(const ModelParams& p) {
    return r_matrix_and_classification(p, b0_analytic(p));
}

double melnikov_phase(const ModelParams& p) {
    const auto cd = connection_coefficients(hypergeom_params(p));
    const double p1 = cd.l12.real(), q1 = cd.l12.imag();
    const double p2 = cd.l22.real(), q2 = cd.l22.imag();
    return std::atan2(p1 * q2 + q1 * p2, q1 * q2 - p1 * p2);
}

double melnikov_closed_form(double t0, const ModelParams& p) {
    const auto cd = connection_coefficients(hypergeom_params(p));
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    const double a12 = std::abs(cd.l12), a22 = std::abs(cd.l22);
    return wp * wp * a12 * a22 * std::cos(2.0 * wm * t0 - melnikov_phase(p)) +
           0.5 * (wm * wm - (a12 * a12 + a22 * a22) * wp * wp);
}

double melnikov_direct(double t0, const Eigen::Vector2d& eta0, const ModelParams& p, const BMatrices& b) {
    if (std::abs(eta0.norm() - 1.0) > 1e-12) throw ParameterError("melnikov_direct: eta0 must be a unit vector");
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    auto m = [](const Eigen::Vector2d& e, double w) { return 0.5 * (w * w * e(0) * e(0) + e(1) * e(1)); };
    const Eigen::Vector2d moved = b.b0 * phi_matrix(t0, wm) * eta0;
    return m(eta0, wm) - m(moved, wp);
}

double melnikov_direct(double t0, const Eigen::Vector2d& eta0, const ModelParams& p, const IntegratorConfig& cfg,
                       double t_limit) {
    return melnikov_direct(t0, eta0, p, b_matrices_numeric(p, t_limit, cfg));
}

double g_function(const ModelParams& p) {
    const auto cd = connection_coefficients(hypergeom_params(p));
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    return wp * wp * wm * wm * std::norm(cd.l22) - 0.25 * wm * wm * (wp - wm) * (wp - wm);
}

double g_scale(const ModelParams& p) {
    const auto cd = connection_coefficients(hypergeom_params(p));
    const double wp = center_frequency(p, Side::Right);
    const double wm = center_frequency(p, Side::Left);
    return wp * wp * wm * wm * std::norm(cd.l22) + 0.25 * wm * wm * (wp - wm) * (wp - wm);
}

GRoot g_zero(double omega, double beta2) {
    const double range = omega * omega - beta2;
    if (!(omega > 0.0) || !(range > 0.0)) {
        std::ostringstream msg;
        msg << "g_zero: omega^2 - beta2 must be positive (omega=" << omega << ", beta2=" << beta2 << ")";
        throw ParameterError(msg.str());
    }
    auto G = [&](double b1) { return g_function(ModelParams(b1, beta2, omega)); };

    constexpr int kScan = 512;
    const double lo = range * 1e-6, hi = range * (1.0 - 1e-6);
    const double ratio = std::pow(hi / lo, 1.0 / (kScan - 1));
    double a = lo, ga = G(lo);
    double b = 0.0, gb = 0.0;
    bool found = false;
    for (int k = 1; k < kScan && !found; ++k) {
        const double x = k == kScan - 1 ? hi : lo * std::pow(ratio, k);
        const double gx = G(x);
        if ((ga > 0.0) != (gx > 0.0) || gx == 0.0) {
            b = x;
            gb = gx;
            found = true;
        } else {
            a = x;
            ga = gx;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "g_zero: no sign change of G in beta1 over (0, " << range << ") at beta2=" << beta2;
        throw NumericalError(msg.str());
    }
    for (int it = 0; it < 200 && gb != 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double gm = G(m);
        const double tol = 1e-12 * g_scale(ModelParams(m, beta2, omega));
        if (std::abs(gm) < tol) {
            a = b = m;
            ga = gb = gm;
            break;
        }
        if ((gm > 0.0) == (ga > 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    GRoot r;
    r.beta2 = beta2;
    r.beta1 = std::abs(ga) < std::abs(gb) ? a : b;
    r.residual = std::min(std::abs(ga), std::abs(gb));
    r.scale = g_scale(ModelParams(r.beta1, beta2, omega));
    return r;
}

GCurve trace_g_zero_curve(double omega, double beta2_min, double beta2_max, int n_points) {
    return g_curve_parallel(omega, beta2_min, beta2_max, n_points);
}

}  // namespace hetmel
