#pragma once

// Variance swaps for general alpha via the resolvent of the reduced process
//   dY = (1 + (1 + nu) Y) du + sqrt(2) Y dB.

#include "alphahyper/common.hpp"
#include "alphahyper/inversion.hpp"
#include "alphahyper/process.hpp"

namespace alphahyper::vswap {

struct GreenEvalParams {
    cplx lambda;
    double nu = 0.0;
    cplx mu;  // sqrt(nu^2 + 4 lambda), principal
    cplx a1;  // 1 + (mu + nu)/2
    cplx b1;  // 1 + mu
    static GreenEvalParams make(cplx lambda, double nu);
};

// Resolvent kernel u_lambda(x, y) of Y.
cplx green_u_lambda(double x, double y, const GreenEvalParams& g);

// Building blocks shared with the alpha = 1 route:
//   lower  = int_0^y z^{B-A+k-1} e^{-z} Phi(A-1, B; z) dz
//   upper  = int_y^inf z^{B-A+k-1} e^{-z} Psi(A-1, B; z) dz
enum class KernelRoute { Series, Quadrature };
const char* to_string(KernelRoute r);

struct KernelEval {
    LogSeriesEval eval;
    KernelRoute route = KernelRoute::Series;
};

struct KernelOptions {
    SeriesOptions series{};
    double max_series_argument = 50.0;  // 2F2 argument cap for the lower kernel
    double cancellation_limit = 1e6;    // max term / |sum| before falling back
    double collision_guard = 1e-4;      // distance to a residue collision
    double quad_tol = 1e-12;
};

KernelEval lower_kummer_integral(cplx A, cplx B, cplx k, double y, const KernelOptions& opt = {});
KernelEval upper_tricomi_integral(cplx A, cplx B, cplx k, double y, const KernelOptions& opt = {});
// Direct double-exponential quadrature of the same integrals (fallback path).
cplx log_lower_kummer_quadrature(cplx A, cplx B, cplx k, double y, double tol = 1e-12);
cplx log_upper_tricomi_quadrature(cplx A, cplx B, cplx k, double y, double tol = 1e-12);

SeriesEval i1_vswap(double x, const GreenEvalParams& g, double alpha, const KernelOptions& opt = {});
SeriesEval i2_vswap(double x, const GreenEvalParams& g, double alpha, const KernelOptions& opt = {});

// Y-time Laplace transform of E[Y_r(x)^{-2/alpha}].
cplx resolvent_I(double x, const GreenEvalParams& g, double alpha);
cplx log_resolvent_I(double x, const GreenEvalParams& g, double alpha);

// Y-time Laplace transform of E[Y_r(x)^{-2/alpha}] without the Re(lambda) > lambda*
// guard. The residue series continues analytically to the whole right half plane.
cplx log_resolvent_I_continued(double x, const GreenEvalParams& g, double alpha);

// SeriesRegion keeps the Bromwich line at lambda* + 1 and throws ContourError
// when that amplifies roundoff too much. Auto falls back to a line just right
// of the origin in that case.
enum class AbscissaPolicy { SeriesRegion, Auto };

struct VarianceSwapResult {
    double value = 0.0;
    double abscissa = 0.0;       // Y-time abscissa of the Bromwich line
    double amplification = 1.0;  // roundoff multiplier exp(abscissa * t / c)
    bool continued = false;      // line lies left of lambda* + 1
};

VarianceSwapResult variance_swap_detailed(const ModelParams& p, double t, const inversion::BromwichConfig& cfg = {},
                                          AbscissaPolicy policy = AbscissaPolicy::Auto);

// Annualised variance swap rate (1/t) int_0^t E[V_s] ds.
double variance_swap(const ModelParams& p, double t, const inversion::BromwichConfig& cfg = {},
                     AbscissaPolicy policy = AbscissaPolicy::Auto);

}  // namespace alphahyper::vswap
