#include <doctest.h>

#include <cmath>
#include <random>

#include "hetmel/errors.hpp"
#include "hetmel/special.hpp"

using namespace hetmel;

namespace {

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("log gamma classical values") {
    CHECK(std::abs(log_gamma(1.0)) < 1e-15);
    CHECK(std::abs(log_gamma(2.0)) < 1e-15);
    CHECK(std::abs(log_gamma(0.5) - std::log(std::sqrt(kPi))) < 1e-14);
    CHECK_THROWS_AS(log_gamma(0.0), PoleError);
    CHECK_THROWS_AS(log_gamma(-3.0), PoleError);
}

TEST_CASE("gamma against high-precision values") {
    // mpmath, 30 digits.
    CHECK(close(std::exp(log_gamma({0.3, 2.0})), std::exp(cplx(-2.359449355937571, -0.9169076135186698)), 1e-13));
    CHECK(close(gamma_fn({-1.5, 0.5}), {0.9379166627878851, 0.34920566814780485}, 1e-13));
    CHECK(close(gamma_fn({4.2, -1.3}), {-0.9850063781769445, -6.12955505204717}, 1e-13));
}

TEST_CASE("reciprocal gamma vanishes exactly at poles") {
    for (int n = 0; n <= 6; ++n) CHECK(rgamma(cplx(-n, 0.0)) == cplx(0.0, 0.0));
    CHECK(is_nonpositive_integer(-4.0));
    CHECK_FALSE(is_nonpositive_integer({-4.0, 1e-3}));
    CHECK(close(rgamma(3.0), 0.5, 1e-15));
}

TEST_CASE("gamma recurrence and reflection at random points") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(-6, 6), im(-4, 4);
    for (int k = 0; k < 100; ++k) {
        const cplx z(re(rng), im(rng));
        CHECK(close(gamma_fn(z + 1.0), z * gamma_fn(z), 1e-12));
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        const cplx refl = gamma_fn(z) * gamma_fn(1.0 - z) * std::sin(kPi * z);
        CHECK(std::abs(refl - kPi) < 1e-11 * std::max(1.0, std::abs(gamma_fn(z) * gamma_fn(1.0 - z))));
    }
}

TEST_CASE("2F1 simple values") {
    CHECK(gauss_2f1({0.5, 1}, {2, -1}, {1, 3}, 0.0) == cplx(1.0, 0.0));
    CHECK(std::abs(gauss_2f1(1.0, 1.0, 2.0, 0.5) - 2.0 * std::log(2.0)) < 1e-14);
    CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, 2.0, 1.5), ParameterError);
}

TEST_CASE("2F1 against high-precision values across the unit interval") {
    const cplx a(0.5, -1), b(-0.3, 0.7), c(1, -2);
    CHECK(close(gauss_2f1(a, b, c, 0.3), {0.9428265562283982, 0.1061209674234147}, 1e-13));
    CHECK(close(gauss_2f1(a, b, c, 0.7), {0.814347516704597, 0.23596197766533328}, 1e-12));
    CHECK(close(gauss_2f1(a, b, c, 0.9), {0.7249060572688941, 0.26982804099311014}, 1e-12));
    CHECK(close(gauss_2f1(a, b, c, -0.8), {1.063730080713381, -0.26045313964327}, 1e-12));
    CHECK(close(gauss_2f1(a, b, c, 0.99), {0.693561629111238, 0.2744308175587535}, 1e-12));
}

TEST_CASE("2F1 contiguous relation in c") {
    // c(c-1)(z-1) F(c-1) + c[c-1-(2c-a-b-1)z] F(c) + (c-a)(c-b) z F(c+1) = 0
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5), zz(0.05, 0.95);
    for (int k = 0; k < 20; ++k) {
        const cplx a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng) + 2.5, u(rng));
        const double z = zz(rng);
        const cplx fm = gauss_2f1(a, b, c - 1.0, z), f0 = gauss_2f1(a, b, c, z), fp = gauss_2f1(a, b, c + 1.0, z);
        const cplx t1 = c * (c - 1.0) * (z - 1.0) * fm;
        const cplx t2 = c * (c - 1.0 - (2.0 * c - a - b - 1.0) * z) * f0;
        const cplx t3 = (c - a) * (c - b) * z * fp;
        const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
        CHECK(std::abs(t1 + t2 + t3) < 1e-10 * scale);
    }
}

TEST_CASE("series and connection formula agree where both converge") {
    const cplx a(0.4, -0.9), b(-1.1, 0.3), c(0.8, -1.6);
    for (double t : {0.3, 0.4, 0.5, 0.6, 0.7}) CHECK(close(gauss_2f1_series(a, b, c, t), gauss_2f1_connection(a, b, c, t), 1e-12));
    CHECK_THROWS_AS(gauss_2f1_connection(1.0, 1.0, 3.0, 0.5), PoleError);
}

TEST_CASE("hypergeometric parameters") {
    const auto d = hypergeom_params(ModelParams(0, 0, 2));
    CHECK(std::abs(d.chi_plus - 1.0) < 1e-15);
    CHECK(std::abs(d.chi_minus) < 1e-15);
    CHECK(std::abs(d.rho_plus - cplx(0, -std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(d.rho_minus - cplx(0, -std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(hypergeom_params(ModelParams(0, 2, 2)).chi_plus - 0.5 * (1 + std::sqrt(17.0))) < 1e-15);

    for (const auto& p : {ModelParams(0.005, 2, 2), ModelParams(0.2, 1, 2), ModelParams(-0.3, 0.5, 1.5)}) {
        const auto hp = hypergeom_params(p);
        CHECK(std::abs(hp.c1 - (hp.chi_plus + hp.rho_plus + hp.rho_minus)) < 1e-14);
        CHECK(std::abs(hp.c2 - (hp.chi_minus + hp.rho_plus + hp.rho_minus)) < 1e-14);
        CHECK(std::abs(hp.c3 - (2.0 * hp.rho_minus + 1.0)) < 1e-14);
        CHECK(std::abs(hp.chi_plus + hp.chi_minus - 1.0) < 1e-12);
        CHECK(std::abs(hp.chi_plus * hp.chi_minus + 2.0 * p.beta2()) < 1e-12);
        // c3 - c1 - c2 is determined by rho+ alone and is never an integer.
        const cplx diff = hp.c3 - hp.c1 - hp.c2;
        CHECK(std::abs(diff + 2.0 * hp.rho_plus) < 1e-14);
        CHECK(std::abs(diff.imag()) > 0.1);
        CHECK(std::abs(hp.c3.imag()) > 0.1);
    }
}

TEST_CASE("connection coefficients at (0.005, 2, 2)") {
    const ModelParams p(0.005, 2, 2);
    const auto cd = connection_coefficients(hypergeom_params(p));
    // mpmath, 30 digits.
    CHECK(std::abs(cd.l12 - cplx(-0.17727507150502922, 0.9854390649807989)) < 1e-12);
    CHECK(std::abs(cd.l22 - cplx(-5.308256017598967e-06, 0.0036700016323840245)) < 1e-14);
    CHECK(std::abs(cd.l11 - cplx(-5.308256017598967e-06, -0.0036700016323840245)) < 1e-14);
    CHECK(std::abs(cd.l21 - cplx(-0.17727507150502922, -0.9854390649807989)) < 1e-12);
    const double ratio = center_frequency(p, Side::Left) / center_frequency(p, Side::Right);
    CHECK(std::abs(std::norm(cd.l12) - std::norm(cd.l22) - ratio) < 1e-10);
    CHECK(std::abs(cd.l0 - (cd.l11 * cd.l22 - cd.l12 * cd.l21)) <= 1e-12 * std::abs(cd.l0));
}

TEST_CASE("connection coefficients at integrable and generic points") {
    const auto z = connection_coefficients(hypergeom_params(ModelParams(0, 3, 2)));
    CHECK(std::abs(z.l22) < 1e-10);
    CHECK(std::abs(z.l11) < 1e-10);
    const auto g = connection_coefficients(hypergeom_params(ModelParams(0.2, 2, 2)));
    CHECK(std::abs(g.l11) > 1e-8);
    CHECK(std::abs(g.l22) > 1e-8);
}

TEST_CASE("analytic NVE solution asymptotics") {
    for (const auto& p : {ModelParams(0.005, 2, 2), ModelParams(0.1, 1, 2), ModelParams(0, 3, 2)}) {
        const double wm = center_frequency(p, Side::Left), wp = center_frequency(p, Side::Right);
        const auto cd = connection_coefficients(hypergeom_params(p));
        const auto lo = nve_solution_analytic(-40.0, p);
        CHECK(std::abs(lo.value - std::exp(cplx(0, wm * -40.0))) < 1e-8);
        const auto hi = nve_solution_analytic(40.0, p);
        const cplx expect = cd.l12 * std::exp(cplx(0, wp * 40.0)) + cd.l22 * std::exp(cplx(0, -wp * 40.0));
        CHECK(std::abs(hi.value - expect) < 1e-8);
    }
}

TEST_CASE("analytic NVE solution satisfies the equation") {
    const ModelParams p(0.005, 2, 2);
    const double h = 1e-3;
    // Fourth-order central differences.
    auto d1 = [&](double t, auto part) {
        return (8.0 * (part(nve_solution_analytic(t + h, p)) - part(nve_solution_analytic(t - h, p))) -
                (part(nve_solution_analytic(t + 2 * h, p)) - part(nve_solution_analytic(t - 2 * h, p)))) /
               (12.0 * h);
    };
    auto value = [](const NveSolution& s) { return s.value; };
    auto deriv = [](const NveSolution& s) { return s.derivative; };
    double worst = 0.0, worst_d = 0.0;
    for (double t = -10; t <= 10; t += 0.25) {
        const auto s = nve_solution_analytic(t, p);
        const double x = heteroclinic_orbit(t, Branch::Plus).position[0];
        worst = std::max(worst, std::abs(d1(t, deriv) + transverse_stiffness(x, p) * s.value));
        worst_d = std::max(worst_d, std::abs(d1(t, value) - s.derivative));
    }
    CHECK(worst < 1e-8);
    CHECK(worst_d < 1e-8);
}
