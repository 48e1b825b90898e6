#include "hetmel/sweep.hpp"

#include <exception>
#include <sstream>

#include "hetmel/errors.hpp"

namespace hetmel {

namespace {

std::vector<double> beta2_samples(double omega, double lo, double hi, int n) {
    if (n < 1) throw ParameterError("g-curve: need at least one point");
    if (!(hi >= lo)) throw ParameterError("g-curve: beta2 range is empty");
    if (!(omega > 0.0) || !(omega * omega - hi > 0.0)) {
        std::ostringstream msg;
        msg << "g-curve: omega^2 - beta2 must stay positive on the range (omega=" << omega << ", beta2_max=" << hi
            << ")";
        throw ParameterError(msg.str());
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    return out;
}

std::optional<GRoot> root_or_skip(double omega, double beta2) {
    try {
        return g_zero(omega, beta2);
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

GCurve assemble(const std::vector<double>& b2, const std::vector<std::optional<GRoot>>& roots) {
    GCurve curve;
    for (std::size_t k = 0; k < b2.size(); ++k) {
        if (roots[k])
            curve.points.push_back(*roots[k]);
        else
            curve.skipped_beta2.push_back(b2[k]);
    }
    return curve;
}

ClassifyRow classify_one(const ModelParams& p) { return {p, r_matrix_and_classification(p), integrability_verdict(p)}; }

BNumericRow b_numeric_one(const ModelParams& p, double t_limit, const IntegratorConfig& cfg) {
    BNumericRow row;
    try {
        row.b = b_matrices_numeric(p, t_limit, cfg);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

GCurve g_curve_parallel(double omega, double beta2_min, double beta2_max, int n_points) {
    const auto b2 = beta2_samples(omega, beta2_min, beta2_max, n_points);
    std::vector<std::optional<GRoot>> roots(b2.size());
    const long n = static_cast<long>(b2.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) roots[k] = root_or_skip(omega, b2[k]);
    return assemble(b2, roots);
}

GCurve g_curve_serial(double omega, double beta2_min, double beta2_max, int n_points) {
    const auto b2 = beta2_samples(omega, beta2_min, beta2_max, n_points);
    std::vector<std::optional<GRoot>> roots(b2.size());
    for (std::size_t k = 0; k < b2.size(); ++k) roots[k] = root_or_skip(omega, b2[k]);
    return assemble(b2, roots);
}

std::vector<ClassifyRow> classify_grid_parallel(const std::vector<ModelParams>& grid) {
    std::vector<std::optional<ClassifyRow>> rows(grid.size());
    std::vector<std::string> errors(grid.size());
    const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) {
        try {
            rows[k] = classify_one(grid[k]);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    std::vector<ClassifyRow> out;
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!rows[k]) throw NumericalError("classify sweep failed: " + errors[k]);
        out.push_back(*rows[k]);
    }
    return out;
}

std::vector<ClassifyRow> classify_grid_serial(const std::vector<ModelParams>& grid) {
    std::vector<ClassifyRow> out;
    out.reserve(grid.size());
    for (const auto& p : grid) out.push_back(classify_one(p));
    return out;
}

std::vector<BNumericRow> b_numeric_grid_parallel(const std::vector<ModelParams>& grid, double t_limit,
                                                 const IntegratorConfig& cfg) {
    std::vector<BNumericRow> rows(grid.size());
    const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) rows[k] = b_numeric_one(grid[k], t_limit, cfg);
    return rows;
}

std::vector<BNumericRow> b_numeric_grid_serial(const std::vector<ModelParams>& grid, double t_limit,
                                               const IntegratorConfig& cfg) {
    std::vector<BNumericRow> rows;
    rows.reserve(grid.size());
    for (const auto& p : grid) rows.push_back(b_numeric_one(p, t_limit, cfg));
    return rows;
}

std::vector<SeedResult> integrate_seeds_parallel(const std::vector<SeedTask>& tasks, const SeedContext& ctx) {
    std::vector<SeedResult> out(tasks.size());
    const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) out[k] = integrate_seed(tasks[k], ctx);
    return out;
}

std::vector<SeedResult> integrate_seeds_serial(const std::vector<SeedTask>& tasks, const SeedContext& ctx) {
    std::vector<SeedResult> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) out.push_back(integrate_seed(t, ctx));
    return out;
}

}  // namespace hetmel
