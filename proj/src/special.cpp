#include "hetmel/special.hpp"

#include <cmath>
#include <sstream>

#include "hetmel/errors.hpp"

namespace hetmel {

namespace {

// Lanczos, g = 7, n = 9.
constexpr int kLanczosG = 7;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kLogPi = 1.14472988584940017414;

constexpr double kSeriesRelTol = 1e-16;
constexpr int kSeriesMaxTerms = 10000;
constexpr double kDirectRadius = 0.75;

cplx log_gamma_lanczos(cplx z) {
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < kLanczosG + 2; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    const cplx t = z + 0.5 + static_cast<double>(kLanczosG);
    return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

std::string describe(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

}  // namespace

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at " + describe(z));
    if (z.real() < 0.5) {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return kLogPi - std::log(std::sin(kPi * z)) - log_gamma_lanczos(1.0 - z);
    }
    return log_gamma_lanczos(z);
}

cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    if (z.real() < 0.5) return std::sin(kPi * z) / kPi * std::exp(log_gamma_lanczos(1.0 - z));
    return std::exp(-log_gamma_lanczos(z));
}

cplx gauss_2f1_series(cplx a, cplx b, cplx c, cplx tau) {
    if (is_nonpositive_integer(c)) throw PoleError("gauss_2f1: c = " + describe(c) + " is a pole");
    cplx sum = 1.0;
    cplx term = 1.0;
    int small_run = 0;
    for (int n = 0; n < kSeriesMaxTerms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * tau;
        sum += term;
        if (term == 0.0) return sum;
        // two consecutive negligible terms guard against an accidental small one
        if (std::abs(term) < kSeriesRelTol * std::abs(sum)) {
            if (++small_run == 2) return sum;
        } else {
            small_run = 0;
        }
    }
    std::ostringstream msg;
    msg << "gauss_2f1: series did not converge in " << kSeriesMaxTerms << " terms (a=" << describe(a)
        << ", b=" << describe(b) << ", c=" << describe(c) << ", tau=" << describe(tau)
        << ", last |term|=" << std::abs(term) << ")";
    throw NumericalError(msg.str());
}

cplx gauss_2f1_connection(cplx a, cplx b, cplx c, cplx tau) {
    const cplx cab = c - a - b;
    if (std::abs(cab.imag()) == 0.0 && cab.real() == std::round(cab.real()))
        throw PoleError("gauss_2f1: c - a - b = " + describe(cab) + " is an integer");
    const cplx s = 1.0 - tau;
    const cplx lg_c = log_gamma(c);
    const cplx first = std::exp(lg_c + log_gamma(cab)) * rgamma(c - a) * rgamma(c - b);
    const cplx second = std::exp(lg_c + log_gamma(-cab)) * rgamma(a) * rgamma(b);
    cplx out = 0.0;
    if (first != 0.0) out += first * gauss_2f1_series(a, b, 1.0 - cab, s);
    if (second != 0.0) out += second * std::exp(cab * std::log(s)) * gauss_2f1_series(c - a, c - b, 1.0 + cab, s);
    return out;
}

cplx gauss_2f1(cplx a, cplx b, cplx c, cplx tau) {
    if (is_nonpositive_integer(c)) throw PoleError("gauss_2f1: c = " + describe(c) + " is a pole");
    if (tau == 0.0) return 1.0;
    if (tau.imag() == 0.0 && tau.real() >= 1.0)
        throw ParameterError("gauss_2f1: tau = " + describe(tau) + " lies on the branch cut [1, inf)");
    const double r = std::abs(tau);
    if (tau.real() < 0.0) {
        // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)), which maps Re z < 0 into |w| < 1.
        const cplx w = tau / (tau - 1.0);
        if (std::abs(w) < r && std::abs(w) <= kDirectRadius)
            return std::exp(-a * std::log(1.0 - tau)) * gauss_2f1_series(a, c - b, c, w);
    }
    if (r <= kDirectRadius) return gauss_2f1_series(a, b, c, tau);
    if (std::abs(1.0 - tau) <= kDirectRadius) return gauss_2f1_connection(a, b, c, tau);
    throw NumericalError("gauss_2f1: tau = " + describe(tau) + " outside the supported region");
}

HypergeomParams hypergeom_params(const ModelParams& p) {
    HypergeomParams hp;
    const cplx i(0.0, 1.0);
    hp.rho_plus = -i * center_frequency(p, Side::Right) / kSqrt2;
    hp.rho_minus = -i * center_frequency(p, Side::Left) / kSqrt2;
    const cplx root = std::sqrt(cplx(1.0 + 8.0 * p.beta2(), 0.0));
    hp.chi_plus = 0.5 * (1.0 + root);
    hp.chi_minus = 0.5 * (1.0 - root);
    hp.c1 = hp.chi_plus + hp.rho_plus + hp.rho_minus;
    hp.c2 = hp.chi_minus + hp.rho_plus + hp.rho_minus;
    hp.c3 = 2.0 * hp.rho_minus + 1.0;
    return hp;
}

ConnectionData connection_coefficients(const HypergeomParams& hp) {
    const cplx c1 = hp.c1, c2 = hp.c2, c3 = hp.c3;
    const cplx g_c3 = log_gamma(c3);
    const cplx g_2mc3 = log_gamma(2.0 - c3);
    const cplx g_diff = log_gamma(c3 - c1 - c2);
    const cplx g_sum = log_gamma(c1 + c2 - c3);
    ConnectionData cd;
    cd.l11 = std::exp(g_c3 + g_diff) * rgamma(c3 - c1) * rgamma(c3 - c2);
    cd.l12 = std::exp(g_2mc3 + g_diff) * rgamma(1.0 - c1) * rgamma(1.0 - c2);
    cd.l21 = std::exp(g_c3 + g_sum) * rgamma(c1) * rgamma(c2);
    cd.l22 = std::exp(g_2mc3 + g_sum) * rgamma(c1 - c3 + 1.0) * rgamma(c2 - c3 + 1.0);
    cd.l0 = cd.l11 * cd.l22 - cd.l12 * cd.l21;
    return cd;
}

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// One term tau^alpha s^beta F(w) and its t-derivative. For the s-branch
// w = s and dw/dt = -sqrt2 tau s; for the tau-branch w = tau, dw/dt = +sqrt2 tau s.
NveSolution power_term(cplx alpha, cplx beta, double log_tau, double log_s, double tau, double s, cplx a, cplx b,
                       cplx c, double w, double dw_sign) {
    const cplx pref = std::exp(alpha * log_tau + beta * log_s);
    const cplx f = gauss_2f1(a, b, c, w);
    const cplx df = a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, w);
    NveSolution out;
    out.value = pref * f;
    out.derivative = kSqrt2 * pref * ((alpha * s - beta * tau) * f + dw_sign * tau * s * df);
    return out;
}

}  // namespace

NveSolution nve_solution_analytic(double t, const HypergeomParams& hp, const ConnectionData& cd) {
    if (!std::isfinite(t)) throw ParameterError("nve_solution_analytic: t must be finite");
    const double u = t / kSqrt2;
    // tau = (1 + tanh u)/2 = 1/(1 + e^{-2u}), s = 1 - tau = 1/(1 + e^{2u})
    const double log_tau = -softplus(-2.0 * u);
    const double log_s = -softplus(2.0 * u);
    const double tau = std::exp(log_tau);
    const double s = std::exp(log_s);
    const cplx c1 = hp.c1, c2 = hp.c2, c3 = hp.c3;
    if (u <= 0.0) {
        return power_term(-hp.rho_minus, hp.rho_plus, log_tau, log_s, tau, s, c1 - c3 + 1.0, c2 - c3 + 1.0, 2.0 - c3,
                          tau, 1.0);
    }
    NveSolution out{0.0, 0.0};
    if (cd.l12 != 0.0) {
        const auto a = power_term(hp.rho_minus, hp.rho_plus, log_tau, log_s, tau, s, c1, c2, c1 + c2 - c3 + 1.0, s,
                                  -1.0);
        out.value += cd.l12 * a.value;
        out.derivative += cd.l12 * a.derivative;
    }
    if (cd.l22 != 0.0) {
        const auto b = power_term(hp.rho_minus, -hp.rho_plus, log_tau, log_s, tau, s, c3 - c1, c3 - c2,
                                  c3 - c1 - c2 + 1.0, s, -1.0);
        out.value += cd.l22 * b.value;
        out.derivative += cd.l22 * b.derivative;
    }
    return out;
}

NveSolution nve_solution_analytic(double t, const ModelParams& p) {
    const auto hp = hypergeom_params(p);
    return nve_solution_analytic(t, hp, connection_coefficients(hp));
}

}  // namespace hetmel
