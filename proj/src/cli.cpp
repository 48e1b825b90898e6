#include "hetmel/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "hetmel/errors.hpp"
#include "hetmel/melnikov.hpp"
#include "hetmel/monodromy.hpp"
#include "hetmel/sweep.hpp"

namespace hetmel {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Eigen::Matrix2d& m) { return json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}); }

json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const Eigen::Matrix2cd& m) {
    return json::array({{to_json(m(0, 0)), to_json(m(0, 1))}, {to_json(m(1, 0)), to_json(m(1, 1))}});
}

json params_json(const ModelParams& p) {
    return json{{"beta1", p.beta1()}, {"beta2", p.beta2()}, {"omega", p.omega()}};
}

json verdict_json(const IntegrabilityVerdict& v) {
    return json{{"condition_c_holds", v.condition_c_holds},
                {"n_witness", v.n_witness ? json(*v.n_witness) : json(nullptr)},
                {"commutative", v.commutative},
                {"inverse_relation_holds", v.inverse_relation_holds},
                {"commutator_norm", v.commutator_norm},
                {"inverse_defect", v.inverse_defect},
                {"verdict", to_string(v.verdict)},
                {"summary", verdict_summary(v.verdict)}};
}

json report_json(const MelnikovReport& r) {
    return json{{"b0", to_json(r.b0)},
                {"r_matrix", to_json(r.r_matrix)},
                {"det_r", r.det_r},
                {"det_r_closed", r.det_r_closed},
                {"tr_r", r.tr_r},
                {"g_value", r.g_value},
                {"phi0", r.phi0},
                {"classification", to_string(r.classification)}};
}

json equilibrium_json(const SaddleCenterData& d) {
    return json{{"location", {d.location[0], d.location[1]}},
                {"lambda", d.lambda},
                {"omega_pm", d.omega_pm},
                {"sigma1", d.sigma1},
                {"sigma2", d.sigma2}};
}

ModelParams require_params(const RunConfig& c) {
    if (!c.beta1 || !c.beta2 || !c.omega) throw ParameterError("--beta1, --beta2 and --omega are required");
    return ModelParams(*c.beta1, *c.beta2, *c.omega);
}

IntegratorConfig integrator_from(const RunConfig& c, IntegratorConfig base) {
    if (c.rel_tol) base.rel_tol = *c.rel_tol;
    if (c.abs_tol) base.abs_tol = *c.abs_tol;
    if (c.max_step) base.max_step = *c.max_step;
    if (c.max_steps) base.max_steps = *c.max_steps;
    base.validate();
    return base;
}

std::string resolve_path(const RunConfig& c, const std::string& default_name) {
    if (!c.output_path.empty()) return c.output_path;
    if (const char* dir = std::getenv("HETMEL_OUTPUT_DIR"); dir && *dir) return (fs::path(dir) / default_name).string();
    return {};
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot open output file " + path.string());
    f << content;
    if (!f) throw ParameterError("failed writing " + path.string());
}

// Writes to the resolved path or, without one, to `out`. Returns the path.
std::string emit(const RunConfig& c, const std::string& default_name, const std::string& content, std::ostream& out) {
    const std::string path = resolve_path(c, default_name);
    if (path.empty())
        out << content;
    else
        write_file(path, content);
    return path;
}

void emit_gnuplot(const RunConfig& c, const std::string& data_path, const std::string& script) {
    if (!c.gnuplot) return;
    if (data_path.empty()) throw ParameterError("--gnuplot needs a file output (--output or HETMEL_OUTPUT_DIR)");
    fs::path gp = data_path;
    gp.replace_extension(".gp");
    write_file(gp, script);
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
    return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> linspace(const SweepRange& r) {
    if (r.n < 1) throw ParameterError("sweep range needs n >= 1");
    std::vector<double> v(static_cast<std::size_t>(r.n));
    for (int k = 0; k < r.n; ++k) v[k] = r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * k / (r.n - 1);
    return v;
}

// ---------------------------------------------------------------------------

int cmd_classify(const RunConfig& c, std::ostream& out) {
    if (!c.beta1_range && !c.beta2_range) {
        if (c.format == OutputFormat::Csv) throw ParameterError("classify: CSV output is for sweeps only");
        if (c.gnuplot) throw ParameterError("--gnuplot applies to CSV outputs");
        const ModelParams p = require_params(c);
        const auto rep = r_matrix_and_classification(p);
        const auto v = integrability_verdict(p);
        json j{{"command", "classify"},
               {"params", params_json(p)},
               {"equilibria",
                {{"right", equilibrium_json(equilibrium_data(p, Side::Right))},
                 {"left", equilibrium_json(equilibrium_data(p, Side::Left))}}},
               {"melnikov", report_json(rep)},
               {"integrability", verdict_json(v)},
               {"classification", to_string(rep.classification)},
               {"verdict", verdict_summary(v.verdict)}};
        emit(c, "classify.json", dump(j), out);
        return kExitOk;
    }
    if (!c.omega) throw ParameterError("classify sweep: --omega is required");
    std::vector<double> b1s, b2s;
    if (c.beta1_range)
        b1s = linspace(*c.beta1_range);
    else if (c.beta1)
        b1s = {*c.beta1};
    else
        throw ParameterError("classify sweep: give --beta1 or --beta1-range");
    if (c.beta2_range)
        b2s = linspace(*c.beta2_range);
    else if (c.beta2)
        b2s = {*c.beta2};
    else
        throw ParameterError("classify sweep: give --beta2 or --beta2-range");
    std::vector<ModelParams> grid;
    for (double b1 : b1s)
        for (double b2 : b2s) grid.emplace_back(b1, b2, *c.omega);
    const auto rows = classify_grid_parallel(grid);

    if (c.format == OutputFormat::Json) {
        if (c.gnuplot) throw ParameterError("--gnuplot applies to CSV outputs");
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"params", params_json(r.params)},
                               {"melnikov", report_json(r.report)},
                               {"integrability", verdict_json(r.verdict)}});
        emit(c, "classify.json", dump(json{{"command", "classify"}, {"rows", arr}}), out);
        return kExitOk;
    }
    std::vector<std::vector<std::string>> table;
    for (const auto& r : rows)
        table.push_back({fmt(r.params.beta1()), fmt(r.params.beta2()), fmt(r.params.omega()), fmt(r.report.det_r),
                         fmt(r.report.tr_r), fmt(r.report.g_value), to_string(r.report.classification),
                         fmt(r.verdict.commutator_norm), verdict_summary(r.verdict.verdict)});
    const auto path = emit(c, "classify.csv",
                           csv({"beta1[1]", "beta2[1]", "omega[1]", "det_r[1]", "tr_r[1]", "g_value[1]",
                                "classification[label]", "commutator_norm[1]", "verdict[label]"},
                               table),
                           out);
    emit_gnuplot(c, path,
                 "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'beta1'\nset ylabel 'beta2'\n"
                 "plot '" + fs::path(path).filename().string() +
                     "' using 1:($6 > 0 ? $2 : 1/0) with points pt 7 title 'G > 0', \\\n"
                     "     '' using 1:($6 <= 0 ? $2 : 1/0) with points pt 6 title 'G <= 0'\n");
    return kExitOk;
}

int cmd_g_curve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (!c.omega) throw ParameterError("g-curve: --omega is required");
    const int n = c.points > 0 ? c.points : 100;
    const auto curve = trace_g_zero_curve(*c.omega, c.beta2_min, c.beta2_max, n);
    for (double b2 : curve.skipped_beta2) err << "g-curve: no sign change of G at beta2=" << fmt(b2) << ", skipped\n";
    if (c.format == OutputFormat::Json) {
        if (c.gnuplot) throw ParameterError("--gnuplot applies to CSV outputs");
        json pts = json::array();
        for (const auto& r : curve.points)
            pts.push_back(json{{"beta1", r.beta1}, {"beta2", r.beta2}, {"residual", r.residual}, {"scale", r.scale}});
        emit(c, "g_curve.json",
             dump(json{{"command", "g-curve"},
                       {"omega", *c.omega},
                       {"points", pts},
                       {"skipped_beta2", curve.skipped_beta2}}),
             out);
        return kExitOk;
    }
    std::vector<std::vector<std::string>> table;
    for (const auto& r : curve.points) table.push_back({fmt(r.beta1), fmt(r.beta2), fmt(r.residual)});
    const auto path = emit(c, "g_curve.csv", csv({"beta1[1]", "beta2[1]", "abs_G[1]"}, table), out);
    emit_gnuplot(c, path,
                 "set datafile separator ','\nset xlabel 'beta1'\nset ylabel 'beta2'\n"
                 "set title 'G(beta1, beta2, omega) = 0'\nplot '" +
                     fs::path(path).filename().string() + "' every ::1 using 1:2 with lines notitle\n");
    return kExitOk;
}

int cmd_melnikov(const RunConfig& c, std::ostream& out) {
    if (c.format == OutputFormat::Json) throw ParameterError("melnikov writes CSV only");
    const ModelParams p = require_params(c);
    const IntegratorConfig ic = integrator_from(c, IntegratorConfig::analysis());
    const int n = c.points > 0 ? c.points : 64;
    const auto b = b_matrices_numeric(p, c.t_limit, ic);
    const Eigen::Vector2d eta0(std::cos(c.eta0_angle), std::sin(c.eta0_angle));
    const double period = kPi / center_frequency(p, Side::Left);
    std::vector<std::vector<std::string>> table;
    for (int k = 0; k < n; ++k) {
        const double t0 = period * k / n;
        table.push_back({fmt(t0), fmt(melnikov_closed_form(t0, p)), fmt(melnikov_direct(t0, eta0, p, b))});
    }
    const auto path = emit(c, "melnikov.csv", csv({"t0[time]", "M_closed[energy]", "M_direct[energy]"}, table), out);
    emit_gnuplot(c, path,
                 "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't0'\nset ylabel 'M(t0)'\n"
                 "plot '" + fs::path(path).filename().string() + "' using 1:2 with lines, '' using 1:3 with points\n");
    return kExitOk;
}

int cmd_monodromy(const RunConfig& c, std::ostream& out) {
    if (c.format == OutputFormat::Csv) throw ParameterError("monodromy writes JSON only");
    if (c.gnuplot) throw ParameterError("--gnuplot applies to CSV outputs");
    const ModelParams p = require_params(c);
    const auto pair = monodromy_nve(p);
    const auto psi = monodromy_psi_basis(p);
    const auto v = integrability_verdict(p, pair);
    json j{{"command", "monodromy"},
           {"params", params_json(p)},
           {"basis", pair.basis_note},
           {"m_plus", to_json(pair.m_plus)},
           {"m_minus", to_json(pair.m_minus)},
           {"commutator_norm", pair.commutator_norm},
           {"inverse_defect", pair.inverse_defect},
           {"psi_basis",
            {{"basis", psi.basis_note},
             {"m_plus", to_json(psi.m_plus)},
             {"m_minus", to_json(psi.m_minus)},
             {"commutator_norm", psi.commutator_norm},
             {"inverse_defect", psi.inverse_defect}}},
           {"integrability", verdict_json(v)},
           {"verdict", verdict_summary(v.verdict)}};
    emit(c, "monodromy.json", dump(j), out);
    return kExitOk;
}

std::string curve_file_name(const std::string& label) {
    std::string s = "curve_";
    for (char ch : label) {
        if (ch == '(') s += '_';
        else if (ch == ')') continue;
        else if (ch == '-') s += "_minus";
        else if (ch == '+') s += "_plus";
        else s += ch;
    }
    return s + ".csv";
}

json orbit_json(const PeriodicOrbit& o) {
    json eig = json::array();
    for (const auto& e : o.eigenvalues) eig.push_back(to_json(e));
    const auto& a = o.anchor_state;
    return json{{"center", o.center == Side::Right ? "right" : "left"},
                {"energy", o.energy},
                {"anchor", {a.x1, a.x2, a.y1, a.y2}},
                {"period", o.period},
                {"newton_residual", o.newton_residual},
                {"multiplier", o.multiplier},
                {"eigenvalues", eig},
                {"return_defect", o.return_defect}};
}

json intersection_json(const IntersectionReport& r) {
    json w = r.witness ? json::array({(*r.witness)[0], (*r.witness)[1]}) : json(nullptr);
    return json{{"kind", to_string(r.kind)},
                {"boundary", r.boundary},
                {"crossings", r.crossings},
                {"witness", w},
                {"angle", r.angle ? json(*r.angle) : json(nullptr)},
                {"gap", r.gap ? json(*r.gap) : json(nullptr)},
                {"min_separation", r.min_separation},
                {"max_separation", r.max_separation},
                {"margin_ratio", finite_or_null(r.margin_ratio)}};
}

int cmd_manifolds(const RunConfig& c, std::ostream& out) {
    if (!c.energy) throw ParameterError("manifolds: --energy is required");
    if (c.format == OutputFormat::Csv) throw ParameterError("manifolds writes curve CSVs plus a JSON report");
    const ModelParams p = require_params(c);
    std::string dir = c.output_path;
    if (dir.empty())
        if (const char* env = std::getenv("HETMEL_OUTPUT_DIR"); env && *env) dir = env;
    if (dir.empty()) throw ParameterError("manifolds: give --output DIR or set HETMEL_OUTPUT_DIR");
    const IntegratorConfig ic = integrator_from(c, IntegratorConfig::sweep());
    const auto ev = detect_heteroclinic_cycle(p, *c.energy, ic, c.trace, c.intersection);

    fs::create_directories(dir);
    json curves = json::array();
    std::string plot = "set datafile separator ','\nset xlabel 'x1'\nset ylabel 'x2'\nplot ";
    for (std::size_t k = 0; k < ev.curves.size(); ++k) {
        const auto& cv = ev.curves[k];
        std::vector<std::vector<std::string>> table;
        for (const auto& pt : cv.points) table.push_back({fmt(pt.x1), fmt(pt.x2), fmt(pt.y2), fmt(pt.sigma)});
        const std::string name = curve_file_name(cv.branch_label);
        write_file(fs::path(dir) / name, csv({"x1[1]", "x2[1]", "y2[1]", "sigma[1]"}, table));
        curves.push_back(json{{"label", cv.branch_label},
                              {"file", name},
                              {"points", cv.points.size()},
                              {"seeds_used", cv.seeds_used},
                              {"seeds_escaped", cv.seeds_escaped},
                              {"arc_bound", cv.arc_bound}});
        plot += (k ? ", \\\n     '" : "'") + name + "' every ::1 using 1:2 with lines title '" + cv.branch_label + "'";
    }
    plot += "\n";
    json j{{"command", "manifolds"},
           {"params", params_json(p)},
           {"energy", *c.energy},
           {"orbits", {{"left", orbit_json(ev.left_orbit)}, {"right", orbit_json(ev.right_orbit)}}},
           {"pairs",
            {{"upper",
              {{"unstable", ev.curves[0].branch_label},
               {"stable", ev.curves[1].branch_label},
               {"report", intersection_json(ev.upper)}}},
             {"lower",
              {{"unstable", ev.curves[2].branch_label},
               {"stable", ev.curves[3].branch_label},
               {"report", intersection_json(ev.lower)}}}}},
           {"heteroclinic_cycle", ev.cycle},
           {"curves", curves}};
    write_file(fs::path(dir) / "manifolds.json", dump(j));
    if (c.gnuplot) write_file(fs::path(dir) / "manifolds.gp", plot);
    out << dump(j);
    return kExitOk;
}

struct Check {
    std::string name;
    double residual;
    double tolerance;
};

int cmd_verify(const RunConfig& c, std::ostream& out) {
    if (c.format == OutputFormat::Csv) throw ParameterError("verify writes JSON only");
    if (c.gnuplot) throw ParameterError("--gnuplot applies to CSV outputs");
    const ModelParams p = require_params(c);
    const IntegratorConfig ic = integrator_from(c, IntegratorConfig::analysis());
    std::vector<Check> checks;

    const auto cd = connection_coefficients(hypergeom_params(p));
    const double wp = center_frequency(p, Side::Right), wm = center_frequency(p, Side::Left);
    checks.push_back({"connection_relation", std::abs(std::norm(cd.l12) - std::norm(cd.l22) - wm / wp), 1e-10});

    const Eigen::Matrix2d b0a = b0_analytic(p, cd);
    const auto bn = b_matrices_numeric(p, c.t_limit, ic);
    checks.push_back({"b0_analytic_vs_numeric", (b0a - bn.b0).cwiseAbs().maxCoeff(), 1e-6});
    checks.push_back({"b_minus_identity", (bn.b_minus - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-6});
    checks.push_back({"det_b0_analytic", std::abs(b0a.determinant() - 1.0), 1e-8});
    checks.push_back({"det_b0_numeric", std::abs(bn.b0.determinant() - 1.0), 1e-8});

    const auto rep = r_matrix_and_classification(p, b0a);
    checks.push_back(
        {"det_r_closed_formula", std::abs(rep.det_r - rep.det_r_closed) / std::max(1.0, std::abs(rep.det_r)), 1e-8});
    checks.push_back({"g_vs_det_r", std::abs(rep.g_value + 0.25 * wm * wm * rep.det_r), 1e-10});

    double mdiff = 0.0;
    const double period = kPi / wm;
    for (int k = 0; k < 64; ++k) {
        const double t0 = period * k / 64;
        mdiff = std::max(mdiff, std::abs(melnikov_closed_form(t0, p) - melnikov_direct(t0, {1.0, 0.0}, p, bn)));
    }
    checks.push_back({"melnikov_closed_vs_direct", mdiff, 1e-5});

    const auto pair = monodromy_nve(p);
    const auto psi = monodromy_psi_basis(p);
    const cplx tr_l = (pair.m_plus * pair.m_minus).trace();
    const cplx tr_psi = (psi.m_plus * psi.m_minus).trace();
    checks.push_back({"monodromy_product_trace", std::abs(tr_l - tr_psi) / std::max(1.0, std::abs(tr_l)), 1e-8});
    if (resonance_ratio_check(p)) {
        const auto eq = monodromy_closed_form_equal_ratio(p);
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es_a(eq.m_minus), es_b(pair.m_minus);
        auto sorted = [](Eigen::Vector2cd v) {
            if (std::abs(v(0)) > std::abs(v(1))) std::swap(v(0), v(1));
            return v;
        };
        const auto va = sorted(es_a.eigenvalues()), vb = sorted(es_b.eigenvalues());
        double spec = 0.0;
        for (int k = 0; k < 2; ++k) spec = std::max(spec, std::abs(va(k) - vb(k)) / std::abs(vb(k)));
        checks.push_back({"monodromy_equal_ratio_spectrum", spec, 1e-8});
        const double cosh_tr = 2.0 * std::cosh(2.0 * kPi * eq.mu);
        checks.push_back({"monodromy_trace_cosh", std::abs(eq.m_minus.trace() - cosh_tr) / cosh_tr, 1e-10});
    }

    bool all = true;
    json arr = json::array();
    for (const auto& ch : checks) {
        const bool pass = ch.residual < ch.tolerance;
        all = all && pass;
        arr.push_back(json{{"name", ch.name}, {"residual", ch.residual}, {"tolerance", ch.tolerance}, {"pass", pass}});
    }
    emit(c, "verify.json", dump(json{{"command", "verify"}, {"params", params_json(p)}, {"checks", arr}, {"pass", all}}),
         out);
    return all ? kExitOk : kExitCheckFailed;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

SweepRange parse_sweep_range(const std::string& text) {
    SweepRange r;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' || r.n < 1 || !(r.hi >= r.lo))
        throw ParameterError("bad sweep range '" + text + "', expected lo:hi:n");
    std::string rest;
    if (is >> rest) throw ParameterError("bad sweep range '" + text + "', expected lo:hi:n");
    return r;
}

std::optional<RunConfig> parse_command_line(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"Melnikov, monodromy and manifold analysis for the quartic saddle-center family", "hetmel"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string fmt_text, b1_range, b2_range;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--beta1", cfg.beta1, "coupling beta1");
        sub->add_option("--beta2", cfg.beta2, "coupling beta2");
        sub->add_option("--omega", cfg.omega, "transverse frequency parameter");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("-o,--output", cfg.output_path, "output file (directory for manifolds)");
        sub->add_option("--format", fmt_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--gnuplot", cfg.gnuplot, "also write a gnuplot script next to the CSV");
    };
    auto add_integrator = [&](CLI::App* sub) {
        sub->add_option("--rel-tol", cfg.rel_tol);
        sub->add_option("--abs-tol", cfg.abs_tol);
        sub->add_option("--max-step", cfg.max_step);
        sub->add_option("--max-steps", cfg.max_steps);
    };

    auto* classify = app.add_subcommand("classify", "R matrix, zero structure of M(t0) and monodromy verdict");
    add_params(classify);
    add_output(classify);
    classify->add_option("--beta1-range", b1_range, "sweep lo:hi:n");
    classify->add_option("--beta2-range", b2_range, "sweep lo:hi:n");

    auto* gcurve = app.add_subcommand("g-curve", "zero level of G in the (beta1, beta2) plane");
    gcurve->add_option("--omega", cfg.omega, "transverse frequency parameter");
    gcurve->add_option("--beta2-min", cfg.beta2_min);
    gcurve->add_option("--beta2-max", cfg.beta2_max);
    gcurve->add_option("--points", cfg.points, "number of beta2 samples (default 100)");
    add_output(gcurve);

    auto* mel = app.add_subcommand("melnikov", "closed-form and direct M(t0) over one period");
    add_params(mel);
    add_output(mel);
    add_integrator(mel);
    mel->add_option("--points", cfg.points, "t0 samples (default 64)");
    mel->add_option("--t-limit", cfg.t_limit, "time at which the B limits are sampled");
    mel->add_option("--eta0-angle", cfg.eta0_angle, "eta0 = (cos a, sin a)");

    auto* mono = app.add_subcommand("monodromy", "monodromy matrices and integrability verdict");
    add_params(mono);
    add_output(mono);

    auto* man = app.add_subcommand("manifolds", "section traces of the Lyapunov-orbit manifolds");
    add_params(man);
    add_output(man);
    add_integrator(man);
    man->add_option("--energy", cfg.energy, "energy level");
    man->add_option("--seed-offset", cfg.trace.seed_offset);
    man->add_option("--seeds", cfg.trace.n_seeds, "initial seeds per branch");
    man->add_option("--max-seeds", cfg.trace.max_seeds);
    man->add_option("--max-return", cfg.trace.max_return);
    man->add_option("--arc-bound", cfg.trace.arc_bound);
    man->add_option("--angle-tol", cfg.intersection.angle_tol);
    man->add_option("--gap-tol", cfg.intersection.gap_tol);
    man->add_option("--boundary-ratio", cfg.intersection.boundary_ratio);

    auto* ver = app.add_subcommand("verify", "cross-check analytic and numeric quantities");
    add_params(ver);
    add_output(ver);
    add_integrator(ver);
    ver->add_option("--t-limit", cfg.t_limit);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ParameterError(e.what());
    }

    if (classify->parsed()) cfg.command = Command::Classify;
    if (gcurve->parsed()) cfg.command = Command::GCurve;
    if (mel->parsed()) cfg.command = Command::Melnikov;
    if (mono->parsed()) cfg.command = Command::Monodromy;
    if (man->parsed()) cfg.command = Command::Manifolds;
    if (ver->parsed()) cfg.command = Command::Verify;
    if (fmt_text == "csv") cfg.format = OutputFormat::Csv;
    if (fmt_text == "json") cfg.format = OutputFormat::Json;
    if (!b1_range.empty()) cfg.beta1_range = parse_sweep_range(b1_range);
    if (!b2_range.empty()) cfg.beta2_range = parse_sweep_range(b2_range);
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
            case Command::Classify: return cmd_classify(cfg, out);
            case Command::GCurve: return cmd_g_curve(cfg, out, err);
            case Command::Melnikov: return cmd_melnikov(cfg, out);
            case Command::Monodromy: return cmd_monodromy(cfg, out);
            case Command::Manifolds: return cmd_manifolds(cfg, out);
            case Command::Verify: return cmd_verify(cfg, out);
        }
    } catch (const ParameterError& e) {
        error_json(err, "parameter", e.what());
        return kExitConfig;
    } catch (const NumericalError& e) {
        error_json(err, "numerical", e.what());
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        error_json(err, "parameter", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        error_json(err, "numerical", e.what());
        return kExitNumerical;
    }
    return kExitConfig;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> cfg;
    try {
        cfg = parse_command_line(args, out);
    } catch (const ParameterError& e) {
        error_json(err, "parameter", e.what());
        return kExitConfig;
    }
    if (!cfg) return kExitOk;
    return run(*cfg, out, err);
}

}  // namespace hetmel
