#pragma once

// alpha = 1 analytics. After the Girsanov change of drift the log-vol
// generator becomes a Schrodinger operator with the Morse potential
//   nu2^2/2 e^{2y} - nu1 e^{y},
// whose Green function is a product of Whittaker functions.

#include <span>
#include <vector>

#include "alphahyper/common.hpp"
#include "alphahyper/inversion.hpp"
#include "alphahyper/process.hpp"

namespace alphahyper::morse {

struct MellinCoeffs {
    cplx lambda;
    cplx alpha0, alpha1, alpha2_sq;
    cplx beta0, beta1, beta2_sq;
    cplx nu1, nu2;
    cplx delta;  // -1/2 + beta0 / (2 nu2)
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
};

// Throws DomainError for alpha != 1, or real lambda outside the strip
// (lambda_minus, lambda_plus), or complex lambda whose real part is outside it.
MellinCoeffs mellin_coeffs(const ModelParams& p, cplx lambda);

// p is the Laplace variable conjugate to t, eta = sqrt(a^2/sigma^4 + 2p/sigma^2).
struct LaplaceVar {
    cplx p;
    cplx eta;
    static LaplaceVar make(const ModelParams& m, cplx p);
};

// Resolvent kernel of the Morse operator, with kappa = nu1/nu2.
cplx green_G(double v, double y, const LaplaceVar& lv, cplx nu1, cplx nu2);
cplx log_green_G(double v, double y, const LaplaceVar& lv, cplx nu1, cplx nu2);

// int_0^inf e^{-p t} E[e^{theta v_t}] dt.
cplx laplace_vol_moment(const ModelParams& m, cplx theta, const LaplaceVar& lv);
cplx log_laplace_vol_moment(const ModelParams& m, cplx theta, const LaplaceVar& lv);

double variance_swap_alpha1(const ModelParams& m, double t, const inversion::TalbotConfig& cfg = {});

enum class SpotRoute { Series, Kernel, Residue, Quadrature };
const char* to_string(SpotRoute r);

struct SpotIntegral {
    LogSeriesEval eval;
    SpotRoute route = SpotRoute::Series;
    cplx value() const { return safe_exp(eval.log_value); }
};

struct SpotOptions {
    SeriesOptions series{1e-15, 20000};
    double cancellation_limit = 1e6;
    double residue_radius = 1.25;  // minimum |delta + 1| for the residue series
    double quad_tol = 1e-12;
};

// I1 = int_0^{z0} z^{eta-1+a/sigma^2} e^{delta z} Phi(aa-1, bb; z) dz
// I2 = int_{z0}^inf (same integrand with Psi), along the ray through z0,
// with aa = eta - nu1/nu2 + 3/2 and bb = 1 + 2 eta.
SpotIntegral i1_spot(const ModelParams& m, const MellinCoeffs& mc, const LaplaceVar& lv, cplx z0,
                     const SpotOptions& opt = {});
SpotIntegral i2_spot(const ModelParams& m, const MellinCoeffs& mc, const LaplaceVar& lv, cplx z0,
                     const SpotOptions& opt = {});
SpotRoute select_i2_route(const MellinCoeffs& mc, cplx z0, const SpotOptions& opt = {});

// Term integrals i_n = int_0^{z0} z^{s-1+n} e^{delta z} dz for n = 0..count-1,
// computed by the backward recurrence, s = eta + a/sigma^2.
std::vector<cplx> i1_term_integrals(cplx s, cplx delta, cplx z0, int count);
// Term integrals j(-n) = int_{z0}^inf z^{c-1+n} e^{-w z} dz by forward recurrence.
std::vector<cplx> i2_term_integrals(cplx c, cplx w, cplx z0, int count);

// int_0^inf e^{-p t} E[(f_t/f0)^lambda] dt.
cplx g_double_transform(const ModelParams& m, cplx lambda, const LaplaceVar& lv, const SpotOptions& opt = {});
cplx log_g_double_transform(const ModelParams& m, cplx lambda, const LaplaceVar& lv,
                            const SpotOptions& opt = {});

// max over p of |p g(0,p) - 1| and, when b >= rho sigma, |p g(1,p) - 1|.
double martingale_identity_residual(const ModelParams& m, std::span<const double> p_values);

}  // namespace alphahyper::morse
