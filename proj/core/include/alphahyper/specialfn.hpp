#pragma once

// Complex Gamma-family and confluent hypergeometric functions.

#include "alphahyper/common.hpp"

namespace alphahyper::specialfn {

// Principal-branch log Gamma (branch cut on the negative real axis).
cplx log_gamma(cplx z);
cplx gamma(cplx z);
// 1/Gamma(z); zero at the poles of Gamma.
cplx rgamma(cplx z);
// -log Gamma(z); -inf at the poles of Gamma.
cplx log_rgamma(cplx z);
// log(sin(pi z)) with the imaginary part left unreduced.
cplx log_sin_pi(cplx z);
cplx log1p(cplx z);

// gamma(s, x) = int_0^x t^{s-1} e^{-t} dt, Re(s) > 0.
cplx lower_incomplete_gamma(cplx s, double x);
cplx lower_incomplete_gamma(cplx s, cplx x);
// Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt, x > 0 (or Re x > 0).
cplx upper_incomplete_gamma(cplx s, double x);
cplx upper_incomplete_gamma(cplx s, cplx x);
cplx log_upper_incomplete_gamma(cplx s, cplx x);
cplx log_lower_incomplete_gamma(cplx s, cplx x);

// Kummer's confluent function Phi(a, b; z) = 1F1.
SeriesEval kummer_phi(cplx a, cplx b, cplx z, const SeriesOptions& opt = {});
// Plain power series without the Kummer transformation.
SeriesEval kummer_phi_series(cplx a, cplx b, cplx z, const SeriesOptions& opt = {});
cplx log_kummer_phi(cplx a, cplx b, cplx z, const SeriesOptions& opt = {});

enum class PsiRoute { Polynomial, Asymptotic, Connection, Integral, Perturbed };
const char* to_string(PsiRoute r);

struct PsiEval {
    cplx log_value;
    PsiRoute route;
};

struct PsiOptions {
    double asymptotic_radius = 30.0;
    double cancellation_limit = 1e3;
    double integer_guard = 1e-6;
};

// Tricomi's confluent function Psi(a, b; z) = U(a, b, z), Re z > 0.
cplx tricomi_psi(cplx a, cplx b, cplx z, const PsiOptions& opt = {});
cplx log_tricomi_psi(cplx a, cplx b, cplx z, const PsiOptions& opt = {});
PsiEval tricomi_psi_eval(cplx a, cplx b, cplx z, const PsiOptions& opt = {});

// Whittaker functions in the (kappa, eta) parametrization, mu = eta:
// M = z^{eta+1/2} e^{-z/2} Phi(eta-kappa+1/2, 1+2 eta; z), W likewise with Psi.
cplx whittaker_m(cplx kappa, cplx eta, cplx z);
cplx whittaker_w(cplx kappa, cplx eta, cplx z);

// 2F2([a1, a2], [b1, b2]; z).
SeriesEval generalized_hypergeometric_2f2(cplx a1, cplx a2, cplx b1, cplx b2, cplx z,
                                          const SeriesOptions& opt = {});

}  // namespace alphahyper::specialfn
