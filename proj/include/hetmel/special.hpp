#pragma once

// Complex gamma / Gauss hypergeometric machinery and the closed-form
// solution of the normal variational equation along x+h.

#include <complex>

#include "hetmel/model.hpp"

namespace hetmel {

using cplx = std::complex<double>;

// log Gamma(z); exp(log_gamma(z)) == Gamma(z). The imaginary part is only
// meaningful modulo 2*pi. Throws PoleError at non-positive integers.
cplx log_gamma(cplx z);
cplx gamma_fn(cplx z);
// 1/Gamma(z), exactly zero at non-positive integers.
cplx rgamma(cplx z);

bool is_nonpositive_integer(cplx z);

// 2F1(a, b; c; tau). Direct series inside |tau| <= 0.75, Pfaff transform for
// Re tau < 0, and the tau -> 1 - tau connection formula near tau = 1.
cplx gauss_2f1(cplx a, cplx b, cplx c, cplx tau);

// Plain Gauss series; caller guarantees |tau| < 1.
cplx gauss_2f1_series(cplx a, cplx b, cplx c, cplx tau);

// Right-hand side of the connection formula relating 2F1 at tau to
// 2F1 at 1 - tau. Requires c - a - b not an integer.
cplx gauss_2f1_connection(cplx a, cplx b, cplx c, cplx tau);

struct HypergeomParams {
    cplx rho_plus;
    cplx rho_minus;
    cplx chi_plus;
    cplx chi_minus;
    cplx c1;
    cplx c2;
    cplx c3;
};

HypergeomParams hypergeom_params(const ModelParams& p);

struct ConnectionData {
    cplx l11;
    cplx l12;
    cplx l21;
    cplx l22;
    cplx l0;
};

ConnectionData connection_coefficients(const HypergeomParams& hp);

struct NveSolution {
    cplx value;
    cplx derivative;
};

// eta(t) = e^{i w- t} + o(1) as t -> -inf; as t -> +inf it tends to
// l12 e^{i w+ t} + l22 e^{-i w+ t}.
NveSolution nve_solution_analytic(double t, const ModelParams& p);
NveSolution nve_solution_analytic(double t, const HypergeomParams& hp, const ConnectionData& cd);

}  // namespace hetmel
