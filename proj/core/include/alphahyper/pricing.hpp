#pragma once

// European calls for alpha = 1 by Talbot inversion in time of the inverse
// Mellin transform in strike of g(lambda, p).

#include <span>
#include <vector>

#include "alphahyper/common.hpp"
#include "alphahyper/inversion.hpp"
#include "alphahyper/morse.hpp"
#include "alphahyper/process.hpp"

namespace alphahyper::pricing {

// Vertical line lambda0 + i c, |c| <= truncation_height, sampled by the
// midpoint rule. NaN fields are resolved automatically.
struct MellinLineConfig {
    double line_abscissa = nan;
    int node_count = 100;
    double truncation_height = nan;
    void validate() const;
};

struct PricingConfig {
    inversion::TalbotConfig talbot{};
    MellinLineConfig mellin{};
    morse::SpotOptions spot{};
};

struct ResolvedLine {
    double lambda0;
    double height;
    int nodes;
    double sigma_ref;  // lognormal control-variate volatility
};

ResolvedLine resolve_line(const ModelParams& m, double t, const MellinLineConfig& cfg);

// g(lambda, p) - 1/(p - lambda(lambda-1) sigma_ref^2/2) on the Talbot x Mellin grid.
struct GGrid {
    double t = 0.0;
    ResolvedLine line{};
    std::vector<inversion::TalbotNode> pnodes;
    std::vector<cplx> lambdas;
    double dc = 0.0;
    std::vector<cplx> diff;  // diff[j * lambdas.size() + k]
    cplx at(std::size_t j, std::size_t k) const { return diff[j * lambdas.size() + k]; }
};

// Throws DomainError for alpha != 1 or a non-martingale forward.
GGrid build_g_grid(const ModelParams& m, double t, const PricingConfig& cfg = {});

// Undiscounted E[(f_t - k)^+] from a grid built for the same model.
double forward_call_from_grid(const ModelParams& m, const GGrid& g, double k);

double call_price(const ModelParams& m, double k, double t, double r, const PricingConfig& cfg = {});

struct SmilePoint {
    double strike;
    double price;
    double implied_vol;  // NaN when the price is outside the no-arbitrage band
};

std::vector<SmilePoint> smile(const ModelParams& m, std::span<const double> strikes, double t, double r,
                              const PricingConfig& cfg = {});

// Discounted Black call on the forward f.
double black_call(double f, double k, double t, double vol, double r);
// Bisection on black_call to 1e-10 in vol.
double implied_vol(double price, double f, double k, double t, double r);

}  // namespace alphahyper::pricing
