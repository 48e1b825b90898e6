#pragma once

// Monodromy of the hypergeometric form of the NVE and the resulting
// (non)integrability test.

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "hetmel/model.hpp"
#include "hetmel/special.hpp"

namespace hetmel {

// e(r) = exp(2 pi i r)
cplx unit_exp(cplx r);

struct HypergeomMonodromy {
    Eigen::Matrix2cd m0;  // around tau = 0
    Eigen::Matrix2cd m1;  // around tau = 1
};

// Throws NumericalError if l0 vanishes.
HypergeomMonodromy monodromy_hypergeometric(const HypergeomParams& hp);
HypergeomMonodromy monodromy_hypergeometric(const HypergeomParams& hp, const ConnectionData& cd);

struct MonodromyPair {
    Eigen::Matrix2cd m_plus;
    Eigen::Matrix2cd m_minus;
    double commutator_norm = 0.0;  // max-abs entry of [M+, M-]
    double inverse_defect = 0.0;   // max-abs entry of M+ M- - id
    std::string basis_note;
};

double max_abs(const Eigen::Matrix2cd& m);

MonodromyPair monodromy_nve(const ModelParams& p);

// M- = exp(2 pi i/lambda J D-), M+ = B0^{-1} exp(-2 pi i/lambda J D+) B0 in
// the basis of Psi. Valid for any p.
MonodromyPair monodromy_psi_basis(const ModelParams& p);

struct EqualRatioMonodromy {
    Eigen::Matrix2cd m_plus;
    Eigen::Matrix2cd m_minus;
    double mu = 0.0;  // w/lambda
};

// cosh/sinh form for w+ = w-; throws ParameterError when the ratios differ.
EqualRatioMonodromy monodromy_closed_form_equal_ratio(const ModelParams& p);

enum class Verdict { NecessaryConditionFails, NecessaryConditionHolds, Indeterminate };
std::string to_string(Verdict v);
// "nonintegrable" / "inconclusive" / "indeterminate"
std::string verdict_summary(Verdict v);

inline constexpr double kCommutativeBelow = 1e-9;
inline constexpr double kNonCommutativeAbove = 1e-6;

struct IntegrabilityVerdict {
    bool condition_c_holds = false;  // beta1 = 0 and beta2 = n(n-1)/2
    std::optional<int> n_witness;
    bool commutative = false;
    bool inverse_relation_holds = false;
    double commutator_norm = 0.0;
    double inverse_defect = 0.0;
    Verdict verdict = Verdict::Indeterminate;
};

// Smallest n >= 1 with |beta2 - n(n-1)/2| < 1e-9, if any.
std::optional<int> triangular_witness(double beta2);

IntegrabilityVerdict integrability_verdict(const ModelParams& p);
IntegrabilityVerdict integrability_verdict(const ModelParams& p, const MonodromyPair& pair);

}  // namespace hetmel
