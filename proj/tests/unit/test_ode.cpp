#include <doctest.h>

#include <cmath>
#include <vector>

#include "hetmel/errors.hpp"
#include "hetmel/melnikov.hpp"
#include "hetmel/ode.hpp"
#include "hetmel/special.hpp"

using namespace hetmel;

TEST_CASE("integrator config validation") {
    CHECK_NOTHROW(IntegratorConfig{}.validate());
    CHECK_THROWS_AS((IntegratorConfig{-1, 1e-12, 0.5, 100}.validate()), ParameterError);
    CHECK_THROWS_AS((IntegratorConfig{1e-10, 1e-12, 0.0, 100}.validate()), ParameterError);
    CHECK_THROWS_AS((IntegratorConfig{1e-10, 1e-12, 0.5, 0}.validate()), ParameterError);
}

TEST_CASE("equilibria stay fixed") {
    const ModelParams p(0.005, 2, 2);
    for (double s : {1.0, -1.0}) {
        const auto tr = integrate({s, 0, 0, 0}, {0, 30}, p, {});
        for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.state(i) == std::array<double, 4>{s, 0, 0, 0});
    }
}

TEST_CASE("x-plane initial data keeps y exactly zero") {
    const ModelParams p(0.2, 2, 2);
    const auto tr = integrate({0.3, 0.2, 0, 0}, {0, 50}, p, {});
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(tr.state(i)[2] == 0.0);
        CHECK(tr.state(i)[3] == 0.0);
    }
}

TEST_CASE("heteroclinic orbit reproduced by integration") {
    const ModelParams p(0.005, 2, 2);
    const auto a = heteroclinic_orbit(-10, Branch::Plus), b = heteroclinic_orbit(10, Branch::Plus);
    // Errors grow like exp(sqrt2 * 10) on the approach to the right saddle, so
    // the local tolerance has to sit well below the endpoint target.
    const auto tr = integrate({a.position[0], a.position[1], 0, 0}, {-10, 10}, p, {1e-12, 1e-14, 0.5, 2'000'000});
    CHECK(std::abs(tr.back()[0] - b.position[0]) < 1e-7);
    CHECK(std::abs(tr.back()[1] - b.position[1]) < 1e-7);
    CHECK(tr.t_end() == 10.0);
}

TEST_CASE("energy conservation over t in [0, 100]") {
    const ModelParams p(0.005, 2, 2);
    // Bounded motions only: above the saddle energy the quartic terms blow up in finite time.
    for (PhaseState s0 : {PhaseState{0.2, 0.1, 0.3, -0.2}, PhaseState{-0.5, 0.0, 0.4, 0.3},
                          PhaseState{0.0, 0.5, 0.0, 0.5}, PhaseState{-0.6, 0.3, 0.1, 0.2}}) {
        REQUIRE(std::abs(hamiltonian(s0, p)) <= 1.0);
        const double h0 = hamiltonian(s0, p);
        const auto tr = integrate(s0, {0, 100}, p, {});
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i)
            worst = std::max(worst, std::abs(hamiltonian(PhaseState::from_array(tr.state(i)), p) - h0));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("backward integration has monotone time") {
    const ModelParams p(0.005, 2, 2);
    const auto tr = integrate({0.1, 0.2, 0.1, 0.0}, {5, -5}, p, {});
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.time(i) < tr.time(i - 1));
    CHECK(tr.t_end() == -5.0);
}

TEST_CASE("step limit raises NumericalError") {
    const ModelParams p(0.005, 2, 2);
    CHECK_THROWS_AS(integrate({0.1, 0.2, 0.1, 0.0}, {0, 100}, p, {1e-10, 1e-12, 0.5, 10}), NumericalError);
}

TEST_CASE("dense output is accurate between steps") {
    const ModelParams p(0.005, 2, 2);
    const auto a = heteroclinic_orbit(-5, Branch::Plus);
    const auto tr = integrate({a.position[0], a.position[1], 0, 0}, {-5, 5}, p, {});
    CHECK_THROWS_AS(tr.interpolate(6.0), ParameterError);
    for (double t = -4.9; t < 5; t += 0.37) {
        const auto q = heteroclinic_orbit(t, Branch::Plus);
        const auto s = tr.interpolate(t);
        CHECK(std::abs(s[0] - q.position[0]) < 1e-8);
        CHECK(std::abs(s[1] - q.position[1]) < 1e-8);
    }
}

TEST_CASE("order check: error falls with tolerance at the expected rate") {
    const ModelParams p(0.005, 2, 2);
    const auto a = heteroclinic_orbit(-10, Branch::Plus), b = heteroclinic_orbit(10, Branch::Plus);
    // Fixed-size steps (rel_tol loose, max_step binding) isolate the method order.
    std::vector<double> err;
    const std::vector<double> hs{0.4, 0.2, 0.1};
    for (double h : hs) {
        const auto tr = integrate({a.position[0], a.position[1], 0, 0}, {-10, 10}, p, {1e-2, 1e-2, h, 100000});
        err.push_back(std::hypot(tr.back()[0] - b.position[0], tr.back()[1] - b.position[1]));
    }
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        const double slope = std::log(err[k] / err[k + 1]) / std::log(hs[k] / hs[k + 1]);
        CHECK(slope > 4.0);
    }
    // Tolerance-driven runs: error at least shrinks as the tolerance is halved repeatedly.
    double prev = 1.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        const auto tr = integrate({a.position[0], a.position[1], 0, 0}, {-10, 10}, p, {tol, tol * 1e-2, 0.5, 100000});
        const double e = std::hypot(tr.back()[0] - b.position[0], tr.back()[1] - b.position[1]);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("events on a synthetic sin trajectory") {
    // y1 = sin t, y2 = cos t: the harmonic oscillator written as a 4-vector.
    auto rhs = [](double, const std::array<double, 4>& y) { return std::array<double, 4>{0.0, 0.0, y[3], -y[2]}; };
    const auto tr = integrate_system<4>(rhs, {0, 0, 0, 1}, 0.0, 20.0, IntegratorConfig{});
    const auto all = find_events(tr, [](const std::array<double, 4>& y) { return y[2]; }, Crossing::Either);
    REQUIRE(all.size() == 6);
    for (std::size_t k = 0; k < all.size(); ++k) CHECK(std::abs(all[k].t - kPi * (k + 1)) < 1e-8);
    const auto rising = find_events(tr, [](const std::array<double, 4>& y) { return y[2]; }, Crossing::Rising);
    REQUIRE(rising.size() == 3);
    CHECK(std::abs(rising[0].t - 2 * kPi) < 1e-8);

    const auto none = find_events(tr, [](const std::array<double, 4>& y) { return y[2] + 2.0; }, Crossing::Either);
    CHECK(none.empty());

    // Re-refining around a found event barely moves it.
    for (const auto& e : all) {
        const auto again =
            refine_event(tr, [](const std::array<double, 4>& y) { return y[2]; }, e.t - 1e-3, e.t + 1e-3);
        CHECK(std::abs(again.t - e.t) < 1e-12);
    }
}

TEST_CASE("x1 event on the heteroclinic orbit") {
    const ModelParams p(0.005, 2, 2);
    const auto a = heteroclinic_orbit(-8, Branch::Plus);
    const auto tr = integrate({a.position[0], a.position[1], 0, 0}, {-8, 8}, p, {1e-12, 1e-14, 0.5, 2'000'000});
    const auto hits = find_event(tr, [](const PhaseState& s) { return s.x1; }, Crossing::Either);
    REQUIRE(hits.size() == 1);
    CHECK(std::abs(hits[0].t) < 1e-9);
}

TEST_CASE("nve: identity over an empty span") {
    const ModelParams p(0.005, 2, 2);
    const auto tr = integrate_with_nve(Eigen::Matrix2d::Identity(), {0, 0}, Branch::Plus, p, {});
    CHECK(unpack_eta(tr.back()) == Eigen::Matrix2d::Identity());
    CHECK(pack_eta(unpack_eta({1, 2, 3, 4})) == std::array<double, 4>{1, 2, 3, 4});
}

TEST_CASE("nve determinant is preserved") {
    const ModelParams p(0.1, 1, 2);
    Eigen::Matrix2d e0;
    e0 << 1.0, 0.3, -0.2, 0.8;
    const auto tr = integrate_with_nve(e0, {-20, 20}, Branch::Plus, p, {});
    const double d0 = e0.determinant();
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double dt = std::abs(tr.time(i) + 20);
        worst = std::max(worst, std::abs(unpack_eta(tr.state(i)).determinant() - d0) / std::max(1.0, dt));
    }
    CHECK(worst < 1e-9);
    CHECK(std::abs(unpack_eta(tr.back()).determinant() - d0) < 1e-7);
}

TEST_CASE("nve column reproduces the analytic solution") {
    const ModelParams p(0.005, 2, 2);
    const double wm = center_frequency(p, Side::Left);
    const Eigen::Matrix2d psi0 = fundamental_matrix_psi(-5.0, p);
    const auto tr = integrate_with_nve(psi0, {-5, 5}, Branch::Plus, p, {});
    const auto st = nve_state_at(tr, 5.0, Branch::Plus);
    const auto sol = nve_solution_analytic(5.0, p);
    CHECK(std::abs(st.eta(0, 0) - sol.value.real()) < 1e-6);
    CHECK(std::abs(st.eta(1, 0) - sol.derivative.real()) < 1e-6);
    CHECK(std::abs(st.eta(0, 1) - sol.value.imag() / wm) < 1e-6);
    CHECK(std::abs(st.base.x1 - heteroclinic_orbit(5.0, Branch::Plus).position[0]) < 1e-15);
}
