#include "hetmel/monodromy.hpp"

#include <cmath>

#include "hetmel/errors.hpp"
#include "hetmel/melnikov.hpp"

namespace hetmel {

cplx unit_exp(cplx r) { return std::exp(cplx(0.0, 2.0 * kPi) * r); }

double max_abs(const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }

HypergeomMonodromy monodromy_hypergeometric(const HypergeomParams& hp, const ConnectionData& cd) {
    if (std::abs(cd.l0) == 0.0 || !std::isfinite(std::abs(cd.l0)))
        throw NumericalError("monodromy_hypergeometric: degenerate l0");
    HypergeomMonodromy out;
    out.m0 << 1.0, 0.0, 0.0, unit_exp(-hp.c3);
    const cplx E = unit_exp(hp.c3 - hp.c1 - hp.c2);
    const cplx a = cd.l11, b = cd.l12, c = cd.l21, d = cd.l22;
    out.m1 << a * d - b * c * E, b * d * (E - 1.0), a * c * (1.0 - E), a * d * E - b * c;
    out.m1 /= cd.l0;
    return out;
}

HypergeomMonodromy monodromy_hypergeometric(const HypergeomParams& hp) {
    return monodromy_hypergeometric(hp, connection_coefficients(hp));
}

namespace {

void fill_norms(MonodromyPair& pair) {
    pair.commutator_norm = max_abs(pair.m_plus * pair.m_minus - pair.m_minus * pair.m_plus);
    pair.inverse_defect = max_abs(pair.m_plus * pair.m_minus - Eigen::Matrix2cd::Identity());
}

// exp(s J D) with D = diag(d1, d2), d1 d2 = w^2 > 0.
Eigen::Matrix2cd exp_jd(cplx s, double d1, double d2) {
    const double w = std::sqrt(d1 * d2);
    Eigen::Matrix2cd a;
    a << 0.0, d2, -d1, 0.0;
    return std::cos(s * w) * Eigen::Matrix2cd::Identity() + (std::sin(s * w) / w) * a;
}

}  // namespace

MonodromyPair monodromy_nve(const ModelParams& p) {
    const auto hp = hypergeom_params(p);
    const auto h = monodromy_hypergeometric(hp);
    MonodromyPair pair;
    pair.m_minus = unit_exp(hp.rho_minus) * h.m0;
    pair.m_plus = unit_exp(hp.rho_plus) * h.m1;
    pair.basis_note = "hypergeometric canonical solutions at tau=0";
    fill_norms(pair);
    return pair;
}

MonodromyPair monodromy_psi_basis(const ModelParams& p) {
    const auto left = equilibrium_data(p, Side::Left);
    const auto right = equilibrium_data(p, Side::Right);
    const Eigen::Matrix2cd b0 = b0_analytic(p).cast<cplx>();
    const cplx i(0.0, 1.0);
    MonodromyPair pair;
    pair.m_minus = exp_jd(2.0 * kPi * i / left.lambda, left.sigma2, left.sigma1);
    pair.m_plus = b0.inverse() * exp_jd(-2.0 * kPi * i / right.lambda, right.sigma2, right.sigma1) * b0;
    pair.basis_note = "Psi fundamental matrix along x+h";
    fill_norms(pair);
    return pair;
}

EqualRatioMonodromy monodromy_closed_form_equal_ratio(const ModelParams& p) {
    if (!resonance_ratio_check(p))
        throw ParameterError("monodromy_closed_form_equal_ratio: requires w+/lambda+ = w-/lambda- (beta1 = 0)");
    const auto pair = monodromy_psi_basis(p);
    EqualRatioMonodromy out;
    out.m_plus = pair.m_plus;
    out.m_minus = pair.m_minus;
    const auto left = equilibrium_data(p, Side::Left);
    out.mu = left.omega_pm / left.lambda;
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::NecessaryConditionFails: return "NecessaryConditionFails";
        case Verdict::NecessaryConditionHolds: return "NecessaryConditionHolds";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

std::string verdict_summary(Verdict v) {
    switch (v) {
        case Verdict::NecessaryConditionFails: return "nonintegrable";
        case Verdict::NecessaryConditionHolds: return "inconclusive";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

std::optional<int> triangular_witness(double beta2) {
    if (beta2 < -1e-9) return std::nullopt;
    const int bound = static_cast<int>(std::ceil((1.0 + std::sqrt(1.0 + 8.0 * std::max(beta2, 0.0))) / 2.0)) + 1;
    for (int n = 1; n <= bound; ++n) {
        if (std::abs(beta2 - 0.5 * n * (n - 1)) < 1e-9) return n;
    }
    return std::nullopt;
}

IntegrabilityVerdict integrability_verdict(const ModelParams& p, const MonodromyPair& pair) {
    IntegrabilityVerdict v;
    if (std::abs(p.beta1()) < 1e-12) v.n_witness = triangular_witness(p.beta2());
    v.condition_c_holds = v.n_witness.has_value();
    v.commutator_norm = pair.commutator_norm;
    v.inverse_defect = pair.inverse_defect;
    v.commutative = pair.commutator_norm < kCommutativeBelow;
    v.inverse_relation_holds = pair.inverse_defect < kCommutativeBelow;
    if (pair.commutator_norm > kNonCommutativeAbove)
        v.verdict = Verdict::NecessaryConditionFails;
    else if (v.commutative)
        v.verdict = Verdict::NecessaryConditionHolds;
    else
        v.verdict = Verdict::Indeterminate;
    return v;
}

IntegrabilityVerdict integrability_verdict(const ModelParams& p) { return integrability_verdict(p, monodromy_nve(p)); }

}  // namespace hetmel
