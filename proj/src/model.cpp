#include "hetmel/model.hpp"

#include <sstream>

#include "hetmel/errors.hpp"

namespace hetmel {

bool ModelParams::is_valid(double beta1, double beta2, double omega) {
    if (!std::isfinite(beta1) || !std::isfinite(beta2) || !std::isfinite(omega)) return false;
    return omega > 0.0 && omega * omega - beta2 > std::abs(beta1);
}

ModelParams::ModelParams(double beta1, double beta2, double omega)
    : beta1_(beta1), beta2_(beta2), omega_(omega) {
    if (!is_valid(beta1, beta2, omega)) {
        std::ostringstream msg;
        msg << "invalid parameters (beta1=" << beta1 << ", beta2=" << beta2 << ", omega=" << omega
            << "): need omega > 0 and omega^2 - beta2 > |beta1|";
        throw ParameterError(msg.str());
    }
}

double hamiltonian(const PhaseState& s, const ModelParams& p) {
    const double w2 = p.omega() * p.omega();
    const double x1s = s.x1 * s.x1;
    const double y1s = s.y1 * s.y1;
    return 0.5 * (s.x2 * s.x2 + s.y2 * s.y2) + 0.5 * (x1s + w2 * y1s) - 0.25 * (x1s * x1s + y1s * y1s) -
           0.5 * p.beta1() * s.x1 * y1s - 0.5 * p.beta2() * x1s * y1s;
}

std::array<double, 4> energy_gradient(const PhaseState& s, const ModelParams& p) {
    const double w2 = p.omega() * p.omega();
    const double y1s = s.y1 * s.y1;
    const double dx1 = s.x1 - s.x1 * s.x1 * s.x1 - 0.5 * p.beta1() * y1s - p.beta2() * s.x1 * y1s;
    const double dy1 = w2 * s.y1 - s.y1 * y1s - p.beta1() * s.x1 * s.y1 - p.beta2() * s.x1 * s.x1 * s.y1;
    return {dx1, s.x2, dy1, s.y2};
}

std::array<std::array<double, 4>, 4> vector_field_jacobian(const PhaseState& s, const ModelParams& p) {
    const double w2 = p.omega() * p.omega();
    const double hxx = 1.0 - 3.0 * s.x1 * s.x1 - p.beta2() * s.y1 * s.y1;
    const double hxy = -p.beta1() * s.y1 - 2.0 * p.beta2() * s.x1 * s.y1;
    const double hyy = w2 - 3.0 * s.y1 * s.y1 - p.beta1() * s.x1 - p.beta2() * s.x1 * s.x1;
    return {{{0.0, 1.0, 0.0, 0.0}, {-hxx, 0.0, -hxy, 0.0}, {0.0, 0.0, 0.0, 1.0}, {-hxy, 0.0, -hyy, 0.0}}};
}

PhaseState vector_field(const PhaseState& s, const ModelParams& p) {
    // x' = J D_x H, y' = J D_y H with J = [[0, 1], [-1, 0]].
    const auto g = energy_gradient(s, p);
    return {g[1], -g[0], g[3], -g[2]};
}

double center_frequency(const ModelParams& p, Side which) {
    const double x1 = which == Side::Right ? 1.0 : -1.0;
    return std::sqrt(transverse_stiffness(x1, p));
}

SaddleCenterData equilibrium_data(const ModelParams& p, Side which) {
    const double x1 = which == Side::Right ? 1.0 : -1.0;
    SaddleCenterData d;
    d.location = {x1, 0.0};
    // Restricted Jacobian at (+-1, 0) is [[0, 1], [2, 0]].
    d.lambda = kSqrt2;
    d.sigma1 = 1.0;
    d.sigma2 = transverse_stiffness(x1, p);
    d.omega_pm = std::sqrt(d.sigma2);
    return d;
}

double saddle_energy(const ModelParams& p) { return hamiltonian(PhaseState{1.0, 0.0, 0.0, 0.0}, p); }

PlanarPoint heteroclinic_orbit(double t, Branch b) {
    const double u = t / kSqrt2;
    const double th = std::tanh(u);
    const double ch = std::cosh(u);
    const double sech2 = 1.0 / (ch * ch);
    const double sign = b == Branch::Plus ? 1.0 : -1.0;
    PlanarPoint pt;
    pt.position = {sign * th, sign * sech2 / kSqrt2};
    pt.velocity = {sign * sech2 / kSqrt2, -sign * sech2 * th};
    return pt;
}

bool same_sign_check(const ModelParams& p) {
    const auto right = equilibrium_data(p, Side::Right);
    const auto left = equilibrium_data(p, Side::Left);
    return (right.sigma1 > 0.0) == (left.sigma1 > 0.0);
}

bool resonance_ratio_check(const ModelParams& p) {
    const auto right = equilibrium_data(p, Side::Right);
    const auto left = equilibrium_data(p, Side::Left);
    return std::abs(right.omega_pm / right.lambda - left.omega_pm / left.lambda) < kResonanceTolerance;
}

}  // namespace hetmel
