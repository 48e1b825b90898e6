// Wall-clock comparison of the OpenMP kernels against their serial twins.
#include <chrono>
#include <cstdio>
#include <functional>
#include <omp.h>
#include <vector>

#include "hetmel/sweep.hpp"

using namespace hetmel;

namespace {

double seconds(const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name, serial, parallel,
                serial / parallel);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    report("g-curve (100 pts)", seconds([] { g_curve_serial(2.0, 0.5, 3.0, 100); }),
           seconds([] { g_curve_parallel(2.0, 0.5, 3.0, 100); }));

    std::vector<ModelParams> grid;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) grid.emplace_back(0.2 * i / 19, 0.5 + 2.5 * j / 19, 2.0);
    report("classify (20x20)", seconds([&] { classify_grid_serial(grid); }),
           seconds([&] { classify_grid_parallel(grid); }));

    std::vector<ModelParams> small(grid.begin(), grid.begin() + 40);
    const auto cfg = IntegratorConfig::analysis();
    report("b-numeric (40)", seconds([&] { b_numeric_grid_serial(small, kDefaultTLimit, cfg); }),
           seconds([&] { b_numeric_grid_parallel(small, kDefaultTLimit, cfg); }));

    const ModelParams p(0.005, 2.0, 2.0);
    const auto orbit = floquet_data(find_periodic_orbit(p, 0.28, Side::Left), p);
    TraceOptions serial_opts, parallel_opts;
    serial_opts.parallel = false;
    report("manifold seeds",
           seconds([&] {
               trace_manifold(orbit, ManifoldSide::Unstable, ManifoldDirection::TowardPartner, p,
                              IntegratorConfig::sweep(), serial_opts);
           }),
           seconds([&] {
               trace_manifold(orbit, ManifoldSide::Unstable, ManifoldDirection::TowardPartner, p,
                              IntegratorConfig::sweep(), parallel_opts);
           }));
    return 0;
}
