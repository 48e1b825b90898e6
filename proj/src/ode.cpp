#include "hetmel/ode.hpp"

namespace hetmel {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0) || max_steps <= 0)
        throw ParameterError("integrator tolerances, max_step and max_steps must all be positive");
}

namespace {

using S4 = std::array<double, 4>;

auto phase_rhs(const ModelParams& p, bool planar) {
    return [&p, planar](double, const S4& y) {
        S4 d = vector_field(PhaseState::from_array(y), p).to_array();
        if (planar) d[2] = d[3] = 0.0;
        return d;
    };
}

}  // namespace

PhaseTrajectory integrate(const PhaseState& initial, TimeSpan span, const ModelParams& p,
                          const IntegratorConfig& cfg) {
    const bool planar = initial.y1 == 0.0 && initial.y2 == 0.0;
    return integrate_system<4>(phase_rhs(p, planar), initial.to_array(), span.t0, span.t1, cfg);
}

PhaseTrajectory integrate_until_escape(const PhaseState& initial, TimeSpan span, const ModelParams& p,
                                       const IntegratorConfig& cfg, double escape_radius) {
    const bool planar = initial.y1 == 0.0 && initial.y2 == 0.0;
    auto halt = [escape_radius](double, const S4& y) {
        return std::abs(y[0]) > escape_radius || std::abs(y[2]) > escape_radius;
    };
    return integrate_system<4>(phase_rhs(p, planar), initial.to_array(), span.t0, span.t1, cfg, halt);
}

Eigen::Matrix2d unpack_eta(const S4& packed) {
    Eigen::Matrix2d m;
    m << packed[0], packed[2], packed[1], packed[3];
    return m;
}

S4 pack_eta(const Eigen::Matrix2d& eta) { return {eta(0, 0), eta(1, 0), eta(0, 1), eta(1, 1)}; }

Trajectory<4> integrate_with_nve(const Eigen::Matrix2d& initial_eta, TimeSpan span, Branch b, const ModelParams& p,
                                 const IntegratorConfig& cfg) {
    if (!std::isfinite(span.t0) || !std::isfinite(span.t1)) throw ParameterError("NVE time span must be finite");
    auto rhs = [&p, b](double t, const S4& e) {
        const double a = transverse_stiffness(heteroclinic_orbit(t, b).position[0], p);
        return S4{e[1], -a * e[0], e[3], -a * e[2]};
    };
    return integrate_system<4>(rhs, pack_eta(initial_eta), span.t0, span.t1, cfg);
}

NveState nve_state_at(const Trajectory<4>& nve, double t, Branch b) {
    const auto pt = heteroclinic_orbit(t, b);
    return {PhaseState{pt.position[0], pt.position[1], 0.0, 0.0}, unpack_eta(nve.interpolate(t))};
}

std::vector<EventHit<4>> find_event(const PhaseTrajectory& traj, const std::function<double(const PhaseState&)>& event,
                                    Crossing dir) {
    return find_events(traj, [&event](const S4& y) { return event(PhaseState::from_array(y)); }, dir);
}

}  // namespace hetmel
