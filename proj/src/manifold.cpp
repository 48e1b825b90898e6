#include "hetmel/manifold.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "hetmel/errors.hpp"
#include "hetmel/sweep.hpp"

namespace hetmel {

namespace {

using S4 = std::array<double, 4>;

double side_sign(Side c) { return c == Side::Right ? 1.0 : -1.0; }

auto phase_rhs(const ModelParams& p) {
    return [&p](double, const S4& y) { return vector_field(PhaseState::from_array(y), p).to_array(); };
}

PhaseState anchor_from(std::array<double, 2> z, double energy, const ModelParams& p) {
    const double hx = hamiltonian(PhaseState{z[0], z[1], 0.0, 0.0}, p);
    const double y2sq = 2.0 * (energy - hx);
    if (!(y2sq > 0.0)) {
        std::ostringstream msg;
        msg << "anchor (" << z[0] << ", " << z[1] << ") lies above the energy level " << energy;
        throw NumericalError(msg.str());
    }
    return {z[0], z[1], 0.0, std::sqrt(y2sq)};
}

struct HalfReturn {
    std::array<double, 2> residual{};
    double t_half = 0.0;
};

HalfReturn half_return(std::array<double, 2> z, double energy, const ModelParams& p, Side center,
                       const IntegratorConfig& cfg) {
    const PhaseState a = anchor_from(z, energy, p);
    const double t_max = 3.0 * kPi / center_frequency(p, center);
    auto halt = [](double, const S4& y) { return y[2] < 0.0 || std::abs(y[0]) > 2.0 || std::abs(y[2]) > 2.0; };
    const auto traj = integrate_system<4>(phase_rhs(p), a.to_array(), 0.0, t_max, cfg, halt);
    const auto hits = find_events(traj, [](const S4& y) { return y[2]; }, Crossing::Falling);
    if (hits.empty()) throw NumericalError("periodic-orbit shooting: no return to y1 = 0");
    HalfReturn out;
    out.residual = {hits.front().state[0] - z[0], hits.front().state[1] - z[1]};
    out.t_half = hits.front().t;
    return out;
}

double norm2(const std::array<double, 2>& r) { return std::hypot(r[0], r[1]); }

}  // namespace

std::array<double, 2> lyapunov_anchor_guess(const ModelParams& p, double energy, Side center) {
    const double xe = side_sign(center);
    const double w = center_frequency(p, center);
    const double amp2 = std::max(0.0, 2.0 * (energy - saddle_energy(p)) / (w * w));
    // x1 - xe = c0 + c2 cos(2 w t) forced by y1 = A sin(w t)
    const double k = 0.5 * p.beta1() + p.beta2() * xe;
    const double c0 = -k * amp2 / 4.0;
    const double c2 = k * amp2 / (2.0 * (4.0 * w * w + 2.0));
    return {xe + c0 + c2, 0.0};
}

PeriodicOrbit find_periodic_orbit(const ModelParams& p, double energy, Side center, std::array<double, 2> guess,
                                  const OrbitOptions& opts) {
    if (!same_sign_check(p)) throw ParameterError("no equal-energy Lyapunov pair: sigma signs differ");
    const double e0 = saddle_energy(p);
    if (!(energy > e0) || energy > e0 + opts.energy_ceiling_offset) {
        std::ostringstream msg;
        msg << "energy " << energy << " outside (" << e0 << ", " << e0 + opts.energy_ceiling_offset << "]";
        throw ParameterError(msg.str());
    }
    std::array<double, 2> z = guess;
    HalfReturn hr = half_return(z, energy, p, center, opts.cfg);
    double res = norm2(hr.residual);
    for (int it = 0; it < opts.max_newton && res >= opts.newton_tol; ++it) {
        constexpr double h = 1e-7;
        Eigen::Matrix2d jac;
        for (int j = 0; j < 2; ++j) {
            auto zp = z;
            zp[j] += h;
            const auto rp = half_return(zp, energy, p, center, opts.cfg).residual;
            jac(0, j) = (rp[0] - hr.residual[0]) / h;
            jac(1, j) = (rp[1] - hr.residual[1]) / h;
        }
        const Eigen::Vector2d dz = -jac.fullPivLu().solve(Eigen::Vector2d(hr.residual[0], hr.residual[1]));
        bool accepted = false;
        for (double lam = 1.0; lam >= 1.0 / 64; lam *= 0.5) {
            const std::array<double, 2> zn{z[0] + lam * dz(0), z[1] + lam * dz(1)};
            try {
                const auto hn = half_return(zn, energy, p, center, opts.cfg);
                if (norm2(hn.residual) < res) {
                    z = zn;
                    hr = hn;
                    res = norm2(hn.residual);
                    accepted = true;
                    break;
                }
            } catch (const NumericalError&) {
            }
        }
        if (!accepted) break;
    }
    if (!(res < opts.newton_tol)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "periodic-orbit Newton did not converge: last anchor (" << z[0] << ", " << z[1] << "), residual "
            << res;
        throw NumericalError(msg.str());
    }
    PeriodicOrbit orbit;
    orbit.anchor_state = anchor_from(z, energy, p);
    orbit.period = 2.0 * hr.t_half;
    orbit.energy = energy;
    orbit.center = center;
    orbit.newton_residual = res;
    return orbit;
}

PeriodicOrbit find_periodic_orbit(const ModelParams& p, double energy, Side center, const OrbitOptions& opts) {
    return find_periodic_orbit(p, energy, center, lyapunov_anchor_guess(p, energy, center), opts);
}

std::vector<FamilyMember> continue_family(const ModelParams& p, const std::vector<double>& energies, Side center,
                                          const OrbitOptions& opts) {
    std::vector<FamilyMember> out;
    std::optional<std::array<double, 2>> seed;
    for (double e : energies) {
        FamilyMember m;
        m.energy = e;
        try {
            if (seed) {
                try {
                    m.orbit = find_periodic_orbit(p, e, center, *seed, opts);
                } catch (const NumericalError&) {
                    m.orbit = find_periodic_orbit(p, e, center, opts);
                }
            } else {
                m.orbit = find_periodic_orbit(p, e, center, opts);
            }
            seed = std::array<double, 2>{m.orbit->anchor_state.x1, m.orbit->anchor_state.x2};
        } catch (const std::exception& ex) {
            m.error = ex.what();
        }
        out.push_back(std::move(m));
    }
    return out;
}

double orbit_y_amplitude(const PeriodicOrbit& orbit, const ModelParams& p, const IntegratorConfig& cfg) {
    const auto traj = integrate_system<4>(phase_rhs(p), orbit.anchor_state.to_array(), 0.0, orbit.period, cfg);
    double amp = 0.0;
    constexpr int kSamples = 400;
    for (int k = 0; k <= kSamples; ++k) amp = std::max(amp, std::abs(traj.interpolate(orbit.period * k / kSamples)[2]));
    return amp;
}

PeriodicOrbit floquet_data(const PeriodicOrbit& orbit, const ModelParams& p, const IntegratorConfig& cfg) {
    using S20 = std::array<double, 20>;
    auto rhs = [&p](double, const S20& y) {
        S20 d{};
        const PhaseState s{y[0], y[1], y[2], y[3]};
        const S4 f = vector_field(s, p).to_array();
        const auto jac = vector_field_jacobian(s, p);
        for (int i = 0; i < 4; ++i) {
            d[i] = f[i];
            for (int j = 0; j < 4; ++j) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += jac[i][k] * y[4 + 4 * k + j];
                d[4 + 4 * i + j] = acc;
            }
        }
        return d;
    };
    S20 y0{};
    const S4 a = orbit.anchor_state.to_array();
    for (int i = 0; i < 4; ++i) {
        y0[i] = a[i];
        y0[4 + 5 * i] = 1.0;
    }
    const auto traj = integrate_system<20>(rhs, y0, 0.0, orbit.period, cfg);
    const S20& yT = traj.back();
    Eigen::Matrix4d mono;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) mono(i, j) = yT[4 + 4 * i + j];

    PeriodicOrbit out = orbit;
    out.return_defect = 0.0;
    for (int i = 0; i < 4; ++i) out.return_defect = std::max(out.return_defect, std::abs(yT[i] - a[i]));

    Eigen::EigenSolver<Eigen::Matrix4d> es(mono);
    const auto vals = es.eigenvalues();
    const auto vecs = es.eigenvectors();
    int iu = -1, is = -1;
    for (int k = 0; k < 4; ++k) {
        out.eigenvalues[k] = vals(k);
        if (std::abs(vals(k).imag()) > 1e-6 * std::max(1.0, std::abs(vals(k)))) continue;
        if (iu < 0 || std::abs(vals(k)) > std::abs(vals(iu))) iu = k;
        if (is < 0 || std::abs(vals(k)) < std::abs(vals(is))) is = k;
    }
    if (iu < 0 || !(std::abs(vals(iu)) > 1.0 + 1e-6)) {
        std::ostringstream msg;
        msg << "floquet_data: no real multiplier above 1 (energy " << orbit.energy << ")";
        throw NumericalError(msg.str());
    }
    out.multiplier = std::abs(vals(iu));
    const double defect = std::abs(vals(iu).real() * vals(is).real() - 1.0);
    if (defect > 1e-6) {
        std::ostringstream msg;
        msg << "floquet_data: reciprocal-pair defect " << defect;
        throw NumericalError(msg.str());
    }
    auto unit_real = [&](int k) {
        Eigen::Vector4d v = vecs.col(k).real();
        v.normalize();
        return std::array<double, 4>{v(0), v(1), v(2), v(3)};
    };
    out.floquet_unstable_dir = unit_real(iu);
    out.floquet_stable_dir = unit_real(is);
    out.has_floquet = true;
    return out;
}

PhaseState project_to_energy(PhaseState s, double energy, const ModelParams& p) {
    for (int it = 0; it < 20; ++it) {
        const double g = hamiltonian(s, p) - energy;
        if (std::abs(g) < 1e-13) break;
        const auto grad = energy_gradient(s, p);
        const double n2 = grad[0] * grad[0] + grad[1] * grad[1] + grad[3] * grad[3];
        s.x1 -= g / n2 * grad[0];
        s.x2 -= g / n2 * grad[1];
        s.y2 -= g / n2 * grad[3];
    }
    return s;
}

std::string branch_label(Side center, ManifoldSide side, ManifoldDirection dir) {
    const double toward = -side_sign(center);
    const double b = dir == ManifoldDirection::TowardPartner ? toward : -toward;
    std::string label = side == ManifoldSide::Unstable ? "Wu_" : "Ws_";
    label += b > 0.0 ? "r" : "l";
    label += center == Side::Left ? "(gamma-)" : "(gamma+)";
    return label;
}

SeedResult integrate_seed(const SeedTask& task, const SeedContext& ctx) {
    const ModelParams& p = *ctx.params;
    const TraceOptions& o = ctx.opts;
    const double far = ctx.travel > 0.0 ? o.window_hi + 0.05 : o.window_lo - 0.05;
    bool escaped = false;
    auto halt = [&](double, const S4& y) {
        if (std::abs(y[0]) > o.escape_radius || std::abs(y[2]) > o.escape_radius) {
            escaped = true;
            return true;
        }
        return ctx.travel > 0.0 ? y[0] > far : y[0] < far;
    };
    SeedResult res;
    Trajectory<4> traj;
    try {
        traj = integrate_system<4>(phase_rhs(p), task.start.to_array(), 0.0, ctx.t_max, ctx.cfg, halt);
    } catch (const NumericalError&) {
        res.escaped = true;
        return res;
    }
    const auto hits = find_events(traj, [](const S4& y) { return y[2]; }, Crossing::Rising);
    int k = 0;
    for (const auto& h : hits) {
        if (std::abs(h.t) <= 0.5 * ctx.period) continue;
        ++k;
        if (h.state[0] < o.window_lo || h.state[0] > o.window_hi) continue;
        PhaseState s = PhaseState::from_array(h.state);
        s.y1 = 0.0;
        s = project_to_energy(s, ctx.energy, p);
        res.points.push_back({s.x1, s.x2, s.y2, task.fraction + k});
    }
    res.escaped = escaped && res.points.empty();
    return res;
}

SectionCurve trace_manifold(const PeriodicOrbit& orbit, ManifoldSide side, ManifoldDirection dir,
                            const ModelParams& p, const IntegratorConfig& cfg, const TraceOptions& opts) {
    if (!orbit.has_floquet) throw ParameterError("trace_manifold: orbit has no Floquet data");
    if (!(opts.seed_offset > 0.0) || opts.n_seeds < 2 || opts.max_seeds < opts.n_seeds || opts.max_return < 1 ||
        !(opts.arc_bound > 0.0) || !(opts.window_hi > opts.window_lo))
        throw ParameterError("trace_manifold: invalid trace options");
    cfg.validate();

    const double toward = -side_sign(orbit.center);
    const double b = dir == ManifoldDirection::TowardPartner ? toward : -toward;
    const auto& v = side == ManifoldSide::Unstable ? orbit.floquet_unstable_dir : orbit.floquet_stable_dir;
    const double vsign = (v[0] >= 0.0 ? 1.0 : -1.0) * b;

    SeedContext ctx;
    ctx.params = &p;
    ctx.cfg = cfg;
    ctx.energy = orbit.energy;
    ctx.period = orbit.period;
    ctx.t_max = (opts.max_return + 1) * orbit.period * (side == ManifoldSide::Unstable ? 1.0 : -1.0);
    ctx.travel = b;
    ctx.opts = opts;

    const S4 a = orbit.anchor_state.to_array();
    auto make_task = [&](double f) {
        const double s = opts.seed_offset * std::pow(orbit.multiplier, f) * vsign;
        PhaseState st{a[0] + s * v[0], a[1] + s * v[1], a[2] + s * v[2], a[3] + s * v[3]};
        // back onto the level set along the full gradient
        for (int it = 0; it < 5; ++it) {
            const double g = hamiltonian(st, p) - orbit.energy;
            const auto gr = energy_gradient(st, p);
            const double n2 = gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2] + gr[3] * gr[3];
            st.x1 -= g / n2 * gr[0];
            st.x2 -= g / n2 * gr[1];
            st.y1 -= g / n2 * gr[2];
            st.y2 -= g / n2 * gr[3];
        }
        return SeedTask{st, f};
    };

    std::map<double, SeedResult> done;
    std::vector<double> pending;
    for (int j = 0; j < opts.n_seeds; ++j) pending.push_back(static_cast<double>(j) / opts.n_seeds);

    SectionCurve curve;
    curve.branch_label = branch_label(orbit.center, side, dir);
    curve.center = orbit.center;
    curve.side = side;
    curve.energy = orbit.energy;
    curve.arc_bound = opts.arc_bound;

    while (true) {
        std::vector<SeedTask> tasks;
        tasks.reserve(pending.size());
        for (double f : pending) tasks.push_back(make_task(f));
        const auto results =
            opts.parallel ? integrate_seeds_parallel(tasks, ctx) : integrate_seeds_serial(tasks, ctx);
        for (std::size_t i = 0; i < tasks.size(); ++i) done[tasks[i].fraction] = results[i];

        std::vector<SectionPoint> pts;
        for (const auto& [f, r] : done) pts.insert(pts.end(), r.points.begin(), r.points.end());
        std::sort(pts.begin(), pts.end(), [](const SectionPoint& l, const SectionPoint& r) { return l.sigma < r.sigma; });

        pending.clear();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double d = std::hypot(pts[i + 1].x1 - pts[i].x1, pts[i + 1].x2 - pts[i].x2);
            if (d > opts.arc_bound) {
                const double mid = 0.5 * (pts[i].sigma + pts[i + 1].sigma);
                const double f = mid - std::floor(mid);
                if (!done.count(f)) pending.push_back(f);
            }
        }
        std::sort(pending.begin(), pending.end());
        pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
        if (pending.empty()) {
            curve.points = std::move(pts);
            break;
        }
        if (static_cast<int>(done.size() + pending.size()) > opts.max_seeds) {
            std::ostringstream msg;
            msg << "trace_manifold(" << curve.branch_label << "): refinement exhausted after " << done.size()
                << " seeds with " << pending.size() << " gaps above the arc bound " << opts.arc_bound;
            throw NumericalError(msg.str());
        }
    }
    curve.seeds_used = static_cast<int>(done.size());
    for (const auto& [f, r] : done) curve.seeds_escaped += r.escaped ? 1 : 0;
    return curve;
}

std::string to_string(IntersectionKind k) {
    switch (k) {
        case IntersectionKind::Transverse: return "Transverse";
        case IntersectionKind::Tangent: return "Tangent";
        case IntersectionKind::Disjoint: return "Disjoint";
    }
    return "?";
}

namespace {

struct Projection {
    double dist = std::numeric_limits<double>::infinity();
    double signed_dist = 0.0;
    std::size_t segment = 0;
    bool interior = false;
};

// Nearest point of polyline s to q; signed by the side of s's direction.
Projection project_onto(const std::vector<SectionPoint>& s, double qx, double qy) {
    Projection best;
    for (std::size_t j = 0; j + 1 < s.size(); ++j) {
        const double ax = s[j].x1, ay = s[j].x2;
        const double dx = s[j + 1].x1 - ax, dy = s[j + 1].x2 - ay;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? ((qx - ax) * dx + (qy - ay) * dy) / len2 : 0.0;
        const bool clamped_lo = t < 0.0 && j == 0;
        const bool clamped_hi = t > 1.0 && j + 2 == s.size();
        t = std::clamp(t, 0.0, 1.0);
        const double px = ax + t * dx, py = ay + t * dy;
        const double d = std::hypot(qx - px, qy - py);
        if (d < best.dist) {
            best.dist = d;
            const double len = std::sqrt(len2);
            best.signed_dist = len > 0.0 ? (dx * (qy - ay) - dy * (qx - ax)) / len : d;
            best.segment = j;
            best.interior = !clamped_lo && !clamped_hi;
        }
    }
    return best;
}

}  // namespace

IntersectionReport classify_intersection(const SectionCurve& u, const SectionCurve& s, const IntersectionOptions& o) {
    if (u.points.size() < 3 || s.points.size() < 3)
        throw NumericalError("classify_intersection: curve has fewer than 3 points (" + u.branch_label + ", " +
                             s.branch_label + ")");
    struct Sample {
        std::size_t index;
        double d;
        std::size_t seg;
    };
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < u.points.size(); ++i) {
        const auto pr = project_onto(s.points, u.points[i].x1, u.points[i].x2);
        if (pr.interior) samples.push_back({i, pr.signed_dist, pr.segment});
    }
    if (samples.size() < 3)
        throw NumericalError("classify_intersection: curves " + u.branch_label + " and " + s.branch_label +
                             " do not overlap");

    auto check_resolved = [](const SectionCurve& c, std::size_t i) {
        const auto& a = c.points[i];
        const auto& b = c.points[i + 1];
        const double d = std::hypot(b.x1 - a.x1, b.x2 - a.x2);
        if (c.arc_bound > 0.0 && d > c.arc_bound * (1.0 + 1e-9)) {
            std::ostringstream msg;
            msg << "classify_intersection: " << c.branch_label << " unresolved near (" << a.x1 << ", " << a.x2
                << "), spacing " << d << " > arc bound " << c.arc_bound;
            throw NumericalError(msg.str());
        }
    };

    IntersectionReport rep;
    rep.min_separation = std::numeric_limits<double>::infinity();
    rep.max_separation = -std::numeric_limits<double>::infinity();
    double min_abs = std::numeric_limits<double>::infinity();
    for (const auto& sm : samples) {
        rep.min_separation = std::min(rep.min_separation, sm.d);
        rep.max_separation = std::max(rep.max_separation, sm.d);
        min_abs = std::min(min_abs, std::abs(sm.d));
    }
    double best_angle = -1.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& a = samples[k];
        const auto& b = samples[k + 1];
        if (b.index != a.index + 1) continue;
        const bool change = (a.d < 0.0 && b.d >= 0.0) || (a.d > 0.0 && b.d <= 0.0);
        if (!change) continue;
        check_resolved(u, a.index);
        check_resolved(s, a.seg);
        ++rep.crossings;
        const auto& p0 = u.points[a.index];
        const auto& p1 = u.points[b.index];
        const double ux = p1.x1 - p0.x1, uy = p1.x2 - p0.x2;
        const auto& q0 = s.points[a.seg];
        const auto& q1 = s.points[a.seg + 1];
        const double sx = q1.x1 - q0.x1, sy = q1.x2 - q0.x2;
        const double angle = std::atan2(std::abs(ux * sy - uy * sx), std::abs(ux * sx + uy * sy));
        if (angle > best_angle) {
            best_angle = angle;
            const double w = a.d / (a.d - b.d);
            rep.witness = std::array<double, 2>{p0.x1 + w * ux, p0.x2 + w * uy};
        }
    }
    const double range = rep.max_separation - rep.min_separation;
    if (rep.crossings > 0) {
        rep.angle = best_angle;
        rep.kind = best_angle > o.angle_tol ? IntersectionKind::Transverse : IntersectionKind::Tangent;
        const double depth = std::min(-rep.min_separation, rep.max_separation);
        rep.margin_ratio = range > 0.0 ? std::max(depth, 0.0) / range : 0.0;
    } else {
        rep.gap = min_abs;
        rep.kind = min_abs > o.gap_tol ? IntersectionKind::Disjoint : IntersectionKind::Tangent;
        rep.margin_ratio = range > 0.0 ? min_abs / range : std::numeric_limits<double>::infinity();
    }
    rep.boundary = rep.margin_ratio < o.boundary_ratio;
    return rep;
}

double hausdorff_distance(const SectionCurve& a, const SectionCurve& b, bool mirror_x2) {
    if (a.points.size() < 2 || b.points.size() < 2) throw NumericalError("hausdorff_distance: curve too short");
    const double m = mirror_x2 ? -1.0 : 1.0;
    std::vector<SectionPoint> am = a.points;
    for (auto& pt : am) pt.x2 *= m;
    double h = 0.0;
    for (const auto& pt : am) h = std::max(h, project_onto(b.points, pt.x1, pt.x2).dist);
    for (const auto& pt : b.points) h = std::max(h, project_onto(am, pt.x1, pt.x2).dist);
    return h;
}

CycleEvidence detect_heteroclinic_cycle(const ModelParams& p, double energy, const IntegratorConfig& cfg,
                                        const TraceOptions& trace, const IntersectionOptions& iopts) {
    CycleEvidence ev;
    ev.left_orbit = floquet_data(find_periodic_orbit(p, energy, Side::Left), p);
    ev.right_orbit = floquet_data(find_periodic_orbit(p, energy, Side::Right), p);
    const auto toward = ManifoldDirection::TowardPartner;
    ev.curves[0] = trace_manifold(ev.left_orbit, ManifoldSide::Unstable, toward, p, cfg, trace);
    ev.curves[1] = trace_manifold(ev.right_orbit, ManifoldSide::Stable, toward, p, cfg, trace);
    ev.curves[2] = trace_manifold(ev.right_orbit, ManifoldSide::Unstable, toward, p, cfg, trace);
    ev.curves[3] = trace_manifold(ev.left_orbit, ManifoldSide::Stable, toward, p, cfg, trace);
    ev.upper = classify_intersection(ev.curves[0], ev.curves[1], iopts);
    ev.lower = classify_intersection(ev.curves[2], ev.curves[3], iopts);
    ev.cycle = ev.upper.kind == IntersectionKind::Transverse && ev.lower.kind == IntersectionKind::Transverse;
    return ev;
}

}  // namespace hetmel
