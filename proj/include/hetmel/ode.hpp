#pragma once

// Adaptive Dormand-Prince 5(4) integration with continuous (dense) output
// and section-crossing detection.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "hetmel/errors.hpp"
#include "hetmel/model.hpp"

namespace hetmel {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.5;
    long max_steps = 2'000'000;

    void validate() const;

    static IntegratorConfig analysis() { return {}; }
    static IntegratorConfig sweep() { return {1e-8, 1e-10, 0.5, 2'000'000}; }
};

struct TimeSpan {
    double t0 = 0.0;
    double t1 = 0.0;
};

template <std::size_t N>
class Trajectory {
public:
    using State = std::array<double, N>;

    std::size_t size() const { return t_.size(); }
    double time(std::size_t i) const { return t_[i]; }
    const State& state(std::size_t i) const { return y_[i]; }
    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    const State& back() const { return y_.back(); }

    // True when the integration stopped early on the halt predicate.
    bool halted() const { return halted_; }

    // Dense output; t must lie inside the integrated span.
    State interpolate(double t) const {
        if (t_.size() == 1) return y_.front();
        const bool forward = t_.back() >= t_.front();
        const double lo = forward ? t_.front() : t_.back();
        const double hi = forward ? t_.back() : t_.front();
        const double slack = 1e-12 * std::max(1.0, std::abs(hi));
        if (t < lo - slack || t > hi + slack) {
            std::ostringstream msg;
            msg << "interpolation time " << t << " outside trajectory span [" << lo << ", " << hi << "]";
            throw ParameterError(msg.str());
        }
        std::size_t i;
        if (forward) {
            auto it = std::upper_bound(t_.begin(), t_.end(), t);
            i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        } else {
            auto it = std::upper_bound(t_.begin(), t_.end(), t, [](double a, double b) { return a > b; });
            i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        }
        if (i >= dense_.size()) i = dense_.size() - 1;
        return interpolate_in_step(i, t);
    }

    State interpolate_in_step(std::size_t i, double t) const {
        const double h = t_[i + 1] - t_[i];
        const double theta = (t - t_[i]) / h;
        const double theta1 = 1.0 - theta;
        const auto& r = dense_[i];
        State out;
        for (std::size_t k = 0; k < N; ++k) {
            out[k] = y_[i][k] + theta * (r[0][k] + theta1 * (r[1][k] + theta * (r[2][k] + theta1 * r[3][k])));
        }
        return out;
    }

    void start(double t, const State& y) {
        t_.assign(1, t);
        y_.assign(1, y);
        dense_.clear();
    }
    void append(double t, const State& y, const std::array<State, 4>& dense) {
        t_.push_back(t);
        y_.push_back(y);
        dense_.push_back(dense);
    }
    void mark_halted() { halted_ = true; }

private:
    std::vector<double> t_;
    std::vector<State> y_;
    std::vector<std::array<State, 4>> dense_;
    bool halted_ = false;
};

namespace detail {

struct NeverHalt {
    template <class S>
    bool operator()(double, const S&) const {
        return false;
    }
};

template <std::size_t N>
double scaled_rms(const std::array<double, N>& v, const std::array<double, N>& scale) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = v[i] / scale[i];
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(N));
}

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 (either direction). `halt(t, y)` is
// checked after every accepted step; returning true ends the integration.
template <std::size_t N, class Rhs, class Halt = detail::NeverHalt>
Trajectory<N> integrate_system(Rhs&& f, const std::array<double, N>& y0, double t0, double t1,
                               const IntegratorConfig& cfg, Halt&& halt = {}) {
    using State = std::array<double, N>;
    cfg.validate();

    // Dormand-Prince 5(4) tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    // Hairer's continuous extension.
    constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    Trajectory<N> traj;
    traj.start(t0, y0);
    if (t1 == t0) return traj;

    const double dir = t1 > t0 ? 1.0 : -1.0;
    State y = y0;
    double t = t0;
    State k1 = f(t, y);
    State scale;
    auto update_scale = [&](const State& a, const State& b) {
        for (std::size_t i = 0; i < N; ++i)
            scale[i] = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
    };

    // Initial step guess (Hairer, Norsett & Wanner).
    double h;
    {
        update_scale(y, y);
        const double dn0 = detail::scaled_rms(y, scale);
        const double dn1 = detail::scaled_rms(k1, scale);
        double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
        h0 = std::min(h0, cfg.max_step);
        State ytry;
        for (std::size_t i = 0; i < N; ++i) ytry[i] = y[i] + dir * h0 * k1[i];
        const State f1 = f(t + dir * h0, ytry);
        State df;
        for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
        const double dn2 = detail::scaled_rms(df, scale) / h0;
        const double dmax = std::max(dn1, dn2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        h = std::min({100.0 * h0, h1, cfg.max_step});
    }

    State k2, k3, k4, k5, k6, k7, ytmp, ynew;
    long steps = 0;
    bool last_rejected = false;
    while (true) {
        if (++steps > cfg.max_steps) {
            std::ostringstream msg;
            msg << "integration step limit (" << cfg.max_steps << ") exceeded at t=" << t;
            throw NumericalError(msg.str());
        }
        const double remaining = (t1 - t) * dir;
        bool final_step = false;
        // Snap to t1 rather than leave a rounding-sized sliver for the next step.
        if (h >= remaining || remaining - h <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t1))) {
            h = remaining;
            final_step = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << t;
            throw NumericalError(msg.str());
        }
        const double hs = dir * h;
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        k2 = f(t + c2 * hs, ytmp);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * hs, ytmp);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * hs, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * hs, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_new = final_step ? t1 : t + hs;
        k6 = f(t + hs, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(t_new, ynew);

        State err;
        for (std::size_t i = 0; i < N; ++i)
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        update_scale(y, ynew);
        const double err_norm = detail::scaled_rms(err, scale);

        if (!std::isfinite(err_norm)) {
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if (err_norm <= 1.0) {
            std::array<State, 4> dense;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                dense[0][i] = ydiff;
                dense[1][i] = bspl;
                dense[2][i] = ydiff - hs * k7[i] - bspl;
                dense[3][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            t = t_new;
            y = ynew;
            k1 = k7;
            traj.append(t, y, dense);
            if (final_step) break;
            if (halt(t, y)) {
                traj.mark_halted();
                break;
            }
            double fac = err_norm == 0.0 ? 10.0 : 0.9 * std::pow(err_norm, -0.2);
            fac = std::clamp(fac, 0.2, 10.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            h = std::min(h * fac, cfg.max_step);
            last_rejected = false;
        } else {
            const double fac = std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            h *= fac;
            last_rejected = true;
        }
    }
    return traj;
}

enum class Crossing { Rising, Falling, Either };

template <std::size_t N>
struct EventHit {
    double t = 0.0;
    std::array<double, N> state{};
};

inline constexpr double kEventTolerance = 1e-10;
inline constexpr int kEventMaxIterations = 60;

// Locates a root of g(state(t)) in [ta, tb] on the dense output: a few
// bisection steps, then Illinois-type secant. Throws NumericalError if the
// bracket is invalid or |g| > kEventTolerance at the end.
template <std::size_t N, class G>
EventHit<N> refine_event(const Trajectory<N>& traj, G&& g, double ta, double tb) {
    double a = ta, b = tb;
    double ga = g(traj.interpolate(a));
    double gb = g(traj.interpolate(b));
    if (ga == 0.0) return {a, traj.interpolate(a)};
    if (gb == 0.0) return {b, traj.interpolate(b)};
    if ((ga > 0.0) == (gb > 0.0)) throw NumericalError("refine_event: bracket has no sign change");

    double best_t = std::abs(ga) < std::abs(gb) ? a : b;
    double best_g = std::min(std::abs(ga), std::abs(gb));
    for (int iter = 0; iter < kEventMaxIterations; ++iter) {
        double m;
        if (iter < 6) {
            m = 0.5 * (a + b);
        } else {
            m = b - gb * (b - a) / (gb - ga);
            const double lo = std::min(a, b), hi = std::max(a, b);
            if (!(m > lo && m < hi)) m = 0.5 * (a + b);
        }
        const double gm = g(traj.interpolate(m));
        if (std::abs(gm) < best_g) {
            best_g = std::abs(gm);
            best_t = m;
        }
        if (gm == 0.0) break;
        if ((gm > 0.0) != (gb > 0.0)) {
            a = b;
            ga = gb;
        } else {
            ga *= 0.5;
        }
        b = m;
        gb = gm;
        if (std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) break;
    }
    if (best_g > kEventTolerance) {
        std::ostringstream msg;
        msg << "refine_event: residual " << best_g << " above tolerance near t=" << best_t;
        throw NumericalError(msg.str());
    }
    return {best_t, traj.interpolate(best_t)};
}

// Every sign change of g along the trajectory, in trajectory order. The
// direction filter refers to increasing t. The initial sample is never
// reported as a crossing.
template <std::size_t N, class G>
std::vector<EventHit<N>> find_events(const Trajectory<N>& traj, G&& g, Crossing dir) {
    std::vector<EventHit<N>> hits;
    if (traj.size() < 2) return hits;
    double g_prev = g(traj.state(0));
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double g_next = g(traj.state(i + 1));
        const bool change = (g_prev < 0.0 && g_next >= 0.0) || (g_prev > 0.0 && g_next <= 0.0);
        if (change) {
            const bool rising = (g_next - g_prev) * (traj.time(i + 1) - traj.time(i)) > 0.0;
            if (dir == Crossing::Either || (dir == Crossing::Rising) == rising)
                hits.push_back(refine_event(traj, g, traj.time(i), traj.time(i + 1)));
        }
        g_prev = g_next;
    }
    return hits;
}

// ---------------------------------------------------------------------------
// Model-specific entry points.

using PhaseTrajectory = Trajectory<4>;

PhaseTrajectory integrate(const PhaseState& initial, TimeSpan span, const ModelParams& p,
                          const IntegratorConfig& cfg);

// Same, but stops once |x1| or |y1| leaves [-escape_radius, escape_radius].
PhaseTrajectory integrate_until_escape(const PhaseState& initial, TimeSpan span, const ModelParams& p,
                                       const IntegratorConfig& cfg, double escape_radius);

struct NveState {
    PhaseState base;
    Eigen::Matrix2d eta;
};

// eta matrix packed column-major into the 4-vector.
Eigen::Matrix2d unpack_eta(const std::array<double, 4>& packed);
std::array<double, 4> pack_eta(const Eigen::Matrix2d& eta);

// Integrates eta' = J D_y^2 H(xh(t), 0) eta along the closed-form
// heteroclinic orbit of branch b.
Trajectory<4> integrate_with_nve(const Eigen::Matrix2d& initial_eta, TimeSpan span, Branch b,
                                 const ModelParams& p, const IntegratorConfig& cfg);

NveState nve_state_at(const Trajectory<4>& nve, double t, Branch b);

std::vector<EventHit<4>> find_event(const PhaseTrajectory& traj, const std::function<double(const PhaseState&)>& event,
                                    Crossing dir);

}  // namespace hetmel
