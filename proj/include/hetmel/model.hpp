#pragma once

// Quartic two-degree-of-freedom Hamiltonian family
//
//   H = (x2^2 + y2^2)/2 + (x1^2 + w^2 y1^2)/2 - (x1^4 + y1^4)/4
//       - b1 x1 y1^2 / 2 - b2 x1^2 y1^2 / 2
//
// The x-plane {y = 0} is invariant and carries two saddles at x = (+-1, 0),
// joined by the heteroclinic orbits x1 = +-tanh(t/sqrt2). Transversally the
// saddles are centers with frequencies w+- = sqrt(w^2 -+ b1 - b2).

#include <array>
#include <cmath>

namespace hetmel {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kPi = 3.14159265358979323846;

class ModelParams {
public:
    // Throws ParameterError unless omega > 0 and omega^2 - beta2 > |beta1|.
    ModelParams(double beta1, double beta2, double omega);

    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double omega() const { return omega_; }

    static bool is_valid(double beta1, double beta2, double omega);

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    double beta1_;
    double beta2_;
    double omega_;
};

struct PhaseState {
    double x1 = 0.0;
    double x2 = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;

    std::array<double, 4> to_array() const { return {x1, x2, y1, y2}; }
    static PhaseState from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

// Which saddle-center: Right is x = (+1, 0) (the "+" equilibrium), Left is (-1, 0).
enum class Side { Right, Left };

// Plus: x+h(t) runs from the left saddle (t -> -inf) to the right one (t -> +inf).
// Minus: x-h(t) = -x+h(t) runs right to left.
enum class Branch { Plus, Minus };

struct SaddleCenterData {
    std::array<double, 2> location{};
    double lambda = 0.0;    // hyperbolic rate in the x-plane
    double omega_pm = 0.0;  // transverse elliptic frequency
    double sigma1 = 0.0;    // eigenvalues of D_y^2 H at the saddle
    double sigma2 = 0.0;
};

struct PlanarPoint {
    std::array<double, 2> position{};
    std::array<double, 2> velocity{};
};

double hamiltonian(const PhaseState& s, const ModelParams& p);
PhaseState vector_field(const PhaseState& s, const ModelParams& p);

// Gradient (dH/dx1, dH/dx2, dH/dy1, dH/dy2).
std::array<double, 4> energy_gradient(const PhaseState& s, const ModelParams& p);

// Jacobian of vector_field, row-major.
std::array<std::array<double, 4>, 4> vector_field_jacobian(const PhaseState& s, const ModelParams& p);

// d^2H/dy1^2 on the x-plane: w^2 - b1 x1 - b2 x1^2. The NVE along any
// x-plane orbit is eta1'' + stiffness(x1(t)) eta1 = 0.
inline double transverse_stiffness(double x1, const ModelParams& p) {
    return p.omega() * p.omega() - p.beta1() * x1 - p.beta2() * x1 * x1;
}

SaddleCenterData equilibrium_data(const ModelParams& p, Side which);

// Transverse frequency w+ (Right) or w- (Left).
double center_frequency(const ModelParams& p, Side which);

// Energy of both saddles, H(+-1, 0, 0, 0).
double saddle_energy(const ModelParams& p);

PlanarPoint heteroclinic_orbit(double t, Branch b);

bool same_sign_check(const ModelParams& p);

inline constexpr double kResonanceTolerance = 1e-12;
bool resonance_ratio_check(const ModelParams& p);

}  // namespace hetmel
