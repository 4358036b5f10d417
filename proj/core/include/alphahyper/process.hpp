#pragma once

// The alpha-hypergeometric stochastic volatility model
//   dv = (a - b e^{alpha v}) dt + sigma dw2,   df = f e^{v} dw1,   d<w1,w2> = rho dt.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alphahyper/common.hpp"

namespace alphahyper {

struct ModelParams {
    double alpha = 1.0;
    double a = 0.0;
    double b = 1.0;
    double sigma = 0.5;
    double rho = 0.0;
    double v0 = 0.0;  // initial log-volatility, V0 = exp(2 v0)
    double f0 = 1.0;

    double V0() const { return std::exp(2.0 * v0); }
    static ModelParams from_variance(double alpha, double a, double b, double sigma, double rho,
                                     double V0, double f0 = 1.0);
    // Throws DomainError unless alpha > 0, b > 0, sigma > 0, |rho| <= 1, f0 > 0.
    void validate() const;
    // Same checks with sigma = 0 allowed (noiseless limit of path functions).
    void validate_paths() const;
};

struct ShiryaevParams {
    double nu = 0.0;
    double q = 0.0;
    double c = 0.0;
};

enum class MartingaleRule { AlphaGE2, RhoNonPositive, AlphaGT1, AlphaEQ1_bGErhoSigma, Fails };
const char* to_string(MartingaleRule r);

struct MartingaleVerdict {
    bool is_martingale = false;
    MartingaleRule rule = MartingaleRule::Fails;
    std::string explanation;
};

namespace process {

struct VPath {
    std::vector<double> v;                 // v at the grid points actually reached
    std::optional<double> stopping_time;   // set when the path explodes (b < 0)
};

// Explicit solution of the log-vol SDE on a grid given Brownian increments
// w2[i] = w(times[i+1]) - w(times[i]).
VPath exact_v_path(const ModelParams& p, std::span<const double> times, std::span<const double> w2);

// Euler-Maruyama path on the same increments (reference scheme).
std::vector<double> euler_v_path(const ModelParams& p, std::span<const double> times,
                                 std::span<const double> w2);

double noiseless_variance(const ModelParams& p, double t);
// int_0^t V_s ds along the noiseless path.
double noiseless_integrated_variance(const ModelParams& p, double t);

ShiryaevParams to_shiryaev(const ModelParams& p);

// E[Z_t^l] with Z = exp(-alpha v).
double z_moment(const ModelParams& p, int l, double t);

MartingaleVerdict martingale_classify(const ModelParams& p);

enum class InversionKind { Identical, MeanReversionShift, OutsideFamily };

struct InvertedModel {
    InversionKind kind = InversionKind::OutsideFamily;
    std::optional<ModelParams> params;
    bool degenerate = false;  // alpha = 1 and b = rho sigma: no mean reversion under Q
    std::string note;
};

InvertedModel inverted_model(const ModelParams& p);

double short_term_ev(const ModelParams& p, double t);
double short_term_vs(const ModelParams& p, double t);
double vs_upper_bound_alpha2(const ModelParams& p, double t);
double long_term_limit(const ModelParams& p);

// Roots of (lambda rho sigma - b)^2 + sigma^2 lambda (1 - lambda); infinite
// when |rho| = 1 makes the polynomial linear.
struct MellinStrip {
    double lambda_minus;
    double lambda_plus;
};
MellinStrip mellin_strip(const ModelParams& p);

// Abscissa floor 4/alpha^2 + 2|nu|/alpha of the general-alpha resolvent series.
double lambda_star(double alpha, double nu);

}  // namespace process
}  // namespace alphahyper
