#pragma once

// OpenMP kernels for the embarrassingly parallel parts of the analysis.
// Each *_parallel kernel has a *_serial twin with identical output, kept as
// the reference implementation for tests and benchmarks.

#include <optional>
#include <string>
#include <vector>

#include "hetmel/manifold.hpp"
#include "hetmel/melnikov.hpp"
#include "hetmel/monodromy.hpp"

namespace hetmel {

GCurve g_curve_parallel(double omega, double beta2_min, double beta2_max, int n_points);
GCurve g_curve_serial(double omega, double beta2_min, double beta2_max, int n_points);

struct ClassifyRow {
    ModelParams params;
    MelnikovReport report;
    IntegrabilityVerdict verdict;
};

std::vector<ClassifyRow> classify_grid_parallel(const std::vector<ModelParams>& grid);
std::vector<ClassifyRow> classify_grid_serial(const std::vector<ModelParams>& grid);

struct BNumericRow {
    std::optional<BMatrices> b;
    std::string error;
};

std::vector<BNumericRow> b_numeric_grid_parallel(const std::vector<ModelParams>& grid, double t_limit,
                                                 const IntegratorConfig& cfg);
std::vector<BNumericRow> b_numeric_grid_serial(const std::vector<ModelParams>& grid, double t_limit,
                                               const IntegratorConfig& cfg);

std::vector<SeedResult> integrate_seeds_parallel(const std::vector<SeedTask>& tasks, const SeedContext& ctx);
std::vector<SeedResult> integrate_seeds_serial(const std::vector<SeedTask>& tasks, const SeedContext& ctx);

}  // namespace hetmel
