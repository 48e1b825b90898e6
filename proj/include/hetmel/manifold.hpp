#pragma once

// Lyapunov orbits near the saddle-centers and the traces of their
// stable/unstable manifolds on the section {y1 = 0, y2 > 0}.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "hetmel/model.hpp"
#include "hetmel/ode.hpp"

namespace hetmel {

struct PeriodicOrbit {
    PhaseState anchor_state;  // y1 = 0, y2 > 0
    double period = 0.0;
    double energy = 0.0;
    Side center = Side::Left;
    double newton_residual = 0.0;

    // Filled by floquet_data.
    bool has_floquet = false;
    double multiplier = 0.0;  // mu > 1
    std::array<std::complex<double>, 4> eigenvalues{};
    std::array<double, 4> floquet_unstable_dir{};
    std::array<double, 4> floquet_stable_dir{};
    double return_defect = 0.0;  // |flow_T(anchor) - anchor|
};

struct OrbitOptions {
    // Accepted energies: (saddle energy, saddle energy + offset].
    double energy_ceiling_offset = 0.25;
    double newton_tol = 1e-10;
    int max_newton = 40;
    IntegratorConfig cfg{1e-12, 1e-13, 0.25, 2'000'000};
};

// Symmetric half-period shooting: the orbit is invariant under y -> -y, so
// starting on y1 = 0 it must reach y1 = 0 again with the same (x1, x2).
PeriodicOrbit find_periodic_orbit(const ModelParams& p, double energy, Side center, const OrbitOptions& opts = {});
PeriodicOrbit find_periodic_orbit(const ModelParams& p, double energy, Side center,
                                  std::array<double, 2> anchor_guess, const OrbitOptions& opts = {});

// Linearized-center guess for the anchor (x1, x2).
std::array<double, 2> lyapunov_anchor_guess(const ModelParams& p, double energy, Side center);

struct FamilyMember {
    double energy = 0.0;
    std::optional<PeriodicOrbit> orbit;
    std::string error;
};

// Natural-parameter continuation; stops seeding from failed members but
// keeps going with the last good orbit.
std::vector<FamilyMember> continue_family(const ModelParams& p, const std::vector<double>& energies, Side center,
                                          const OrbitOptions& opts = {});

// Max |y1| along one period.
double orbit_y_amplitude(const PeriodicOrbit& orbit, const ModelParams& p, const IntegratorConfig& cfg);

PeriodicOrbit floquet_data(const PeriodicOrbit& orbit, const ModelParams& p,
                           const IntegratorConfig& cfg = {1e-12, 1e-13, 0.25, 2'000'000});

// Moves a section point (y1 = 0) back onto the energy level along the
// gradient of H restricted to (x1, x2, y2).
PhaseState project_to_energy(PhaseState s, double energy, const ModelParams& p);

enum class ManifoldSide { Stable, Unstable };
enum class ManifoldDirection { TowardPartner, Away };

struct SectionPoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double sigma = 0.0;  // seed fraction + return index, increases along the curve
};

struct SectionCurve {
    std::vector<SectionPoint> points;
    std::string branch_label;  // e.g. "Wu_r(gamma-)"
    Side center = Side::Left;
    ManifoldSide side = ManifoldSide::Unstable;
    int crossing_index = 1;
    double energy = 0.0;
    double arc_bound = 0.0;
    int seeds_used = 0;
    int seeds_escaped = 0;
};

struct TraceOptions {
    double seed_offset = 1e-6;
    int n_seeds = 64;
    int max_seeds = 4096;
    int max_return = 8;
    double arc_bound = 2e-3;
    double window_lo = -0.8;  // x1 window where section points are kept
    double window_hi = 0.8;
    double escape_radius = 2.0;
    bool parallel = true;
};

std::string branch_label(Side center, ManifoldSide side, ManifoldDirection dir);

SectionCurve trace_manifold(const PeriodicOrbit& orbit, ManifoldSide side, ManifoldDirection dir,
                            const ModelParams& p, const IntegratorConfig& cfg = IntegratorConfig::sweep(),
                            const TraceOptions& opts = {});

// --- seed kernel (shared with the OpenMP sweep module) ---

struct SeedTask {
    PhaseState start;
    double fraction = 0.0;
};

struct SeedResult {
    std::vector<SectionPoint> points;
    bool escaped = false;
};

struct SeedContext {
    const ModelParams* params = nullptr;
    IntegratorConfig cfg;
    double energy = 0.0;
    double period = 0.0;
    double t_max = 0.0;    // signed: negative for backward integration
    double travel = 1.0;   // +1 if the branch moves toward larger x1
    TraceOptions opts;
};

SeedResult integrate_seed(const SeedTask& task, const SeedContext& ctx);

// --- intersection geometry ---

enum class IntersectionKind { Transverse, Tangent, Disjoint };
std::string to_string(IntersectionKind k);

struct IntersectionOptions {
    double angle_tol = 1e-4;
    double gap_tol = 1e-5;
    // Near-tangency flag: the smaller side of the separation profile (or the
    // gap, when there is no crossing) is below this fraction of its range.
    double boundary_ratio = 0.1;
};

struct IntersectionReport {
    IntersectionKind kind = IntersectionKind::Disjoint;
    bool boundary = false;
    int crossings = 0;
    std::optional<std::array<double, 2>> witness;
    std::optional<double> angle;  // largest crossing angle, radians
    std::optional<double> gap;    // min |separation| when there is no crossing
    double min_separation = 0.0;  // signed, u relative to s
    double max_separation = 0.0;
    double margin_ratio = 0.0;
};

// Throws NumericalError when either curve is too short or its spacing
// exceeds its arc bound where the verdict is decided.
IntersectionReport classify_intersection(const SectionCurve& u, const SectionCurve& s,
                                         const IntersectionOptions& opts = {});

double hausdorff_distance(const SectionCurve& a, const SectionCurve& b, bool mirror_x2 = false);

struct CycleEvidence {
    bool cycle = false;
    IntersectionReport upper;  // Wu_r(gamma-) vs Ws_l(gamma+)
    IntersectionReport lower;  // Wu_l(gamma+) vs Ws_r(gamma-)
    PeriodicOrbit left_orbit;
    PeriodicOrbit right_orbit;
    std::array<SectionCurve, 4> curves;  // the four branches, in the order above
};

CycleEvidence detect_heteroclinic_cycle(const ModelParams& p, double energy,
                                        const IntegratorConfig& cfg = IntegratorConfig::sweep(),
                                        const TraceOptions& trace = {}, const IntersectionOptions& iopts = {});

}  // namespace hetmel
