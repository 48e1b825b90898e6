#include <doctest.h>

#include "hetmel/errors.hpp"
#include "hetmel/sweep.hpp"

using namespace hetmel;

TEST_CASE("g-curve kernels agree") {
    const auto a = g_curve_parallel(2.0, 0.5, 3.0, 21);
    const auto b = g_curve_serial(2.0, 0.5, 3.0, 21);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].beta1 == b.points[k].beta1);
        CHECK(a.points[k].beta2 == b.points[k].beta2);
    }
    CHECK(a.skipped_beta2 == b.skipped_beta2);
    // beta2 = 1 and 3 are integrable points where the zero curve touches beta1 = 0.
    CHECK(a.skipped_beta2 == std::vector<double>{1.0, 3.0});
    CHECK_THROWS_AS(g_curve_parallel(2.0, 0.5, 4.0, 5), ParameterError);
}

TEST_CASE("classify grid kernels agree and keep input order") {
    std::vector<ModelParams> grid;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) grid.emplace_back(0.2 * i / 5, 0.5 + 2.5 * j / 5, 2.0);
    const auto a = classify_grid_parallel(grid);
    const auto b = classify_grid_serial(grid);
    REQUIRE(a.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(a[k].params == grid[k]);
        CHECK(a[k].report.det_r == b[k].report.det_r);
        CHECK(a[k].report.classification == b[k].report.classification);
        CHECK(a[k].verdict.commutator_norm == b[k].verdict.commutator_norm);
    }
}

TEST_CASE("numeric B grid kernels agree and report failures per row") {
    const std::vector<ModelParams> grid{ModelParams(0.005, 2, 2), ModelParams(0.1, 1, 2), ModelParams(0.2, 0.5, 2)};
    const auto a = b_numeric_grid_parallel(grid, kDefaultTLimit, IntegratorConfig::analysis());
    const auto b = b_numeric_grid_serial(grid, kDefaultTLimit, IntegratorConfig::analysis());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        REQUIRE(a[k].b.has_value());
        CHECK(a[k].b->b0 == b[k].b->b0);
    }
    const auto bad = b_numeric_grid_parallel(grid, 3.0, IntegratorConfig::analysis());
    for (const auto& r : bad) {
        CHECK_FALSE(r.b.has_value());
        CHECK_FALSE(r.error.empty());
    }
}
