#include "alphahyper/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "alphahyper/parallel.hpp"

namespace alphahyper::pricing {

void MellinLineConfig::validate() const {
    if (node_count < 8 || node_count % 2 != 0)
        throw DomainError("MellinLineConfig: node_count must be even and >= 8");
    if (!std::isnan(truncation_height) && !(truncation_height > 0.0 && std::isfinite(truncation_height)))
        throw DomainError("MellinLineConfig: truncation_height must be positive");
}

namespace {

void require_pricing_model(const ModelParams& m) {
    m.validate();
    if (m.alpha != 1.0) throw DomainError("call pricing requires alpha = 1");
    const auto v = process::martingale_classify(m);
    if (!v.is_martingale) throw DomainError("call pricing requires a martingale forward: " + v.explanation);
}

}  // namespace

ResolvedLine resolve_line(const ModelParams& m, double t, const MellinLineConfig& cfg) {
    cfg.validate();
    const auto strip = process::mellin_strip(m);
    const double lo = std::max(strip.lambda_minus, -2.0);
    const double hi = std::min(strip.lambda_plus, 3.0);
    ResolvedLine r;
    r.nodes = cfg.node_count;
    r.lambda0 = std::isnan(cfg.line_abscissa) ? 0.5 * (lo + hi) : cfg.line_abscissa;
    const double margin = 1e-3 * (strip.lambda_plus - strip.lambda_minus);
    if (!(r.lambda0 > strip.lambda_minus + margin && r.lambda0 < strip.lambda_plus - margin))
        throw DomainError("Mellin line abscissa " + std::to_string(r.lambda0) + " outside the strip (" +
                          std::to_string(strip.lambda_minus) + ", " + std::to_string(strip.lambda_plus) + ")");
    const double V0 = m.V0();
    const double vs = process::short_term_vs(m, t);
    r.sigma_ref = std::sqrt(std::clamp(vs, 0.25 * V0, 4.0 * V0));
    if (std::isnan(cfg.truncation_height)) {
        const double d = std::min(r.lambda0 - lo, hi - r.lambda0);
        const double w = r.sigma_ref * r.sigma_ref * t;
        r.height = std::clamp(std::cbrt(2.0 * pi * d * r.nodes / w), 5.0, 200.0);
    } else {
        r.height = cfg.truncation_height;
    }
    return r;
}

GGrid build_g_grid(const ModelParams& m, double t, const PricingConfig& cfg) {
    require_pricing_model(m);
    if (!(t > 0.0)) throw DomainError("call pricing: t must be positive");
    GGrid g;
    g.t = t;
    g.line = resolve_line(m, t, cfg.mellin);
    g.pnodes = inversion::talbot_nodes(t, cfg.talbot);
    const int n = g.line.nodes;
    g.dc = 2.0 * g.line.height / n;
    g.lambdas.resize(n);
    for (int k = 0; k < n; ++k) g.lambdas[k] = cplx(g.line.lambda0, -g.line.height + (k + 0.5) * g.dc);
    const std::size_t np = g.pnodes.size(), nl = g.lambdas.size();
    g.diff.assign(np * nl, cplx(0.0, 0.0));
    const double half_s2 = 0.5 * g.line.sigma_ref * g.line.sigma_ref;
    parallel_for(np * nl, [&](std::size_t i) {
        const std::size_t j = i / nl, k = i % nl;
        const cplx p = g.pnodes[j].p;
        const cplx lam = g.lambdas[k];
        try {
            const auto lv = morse::LaplaceVar::make(m, p);
            const cplx gv = morse::g_double_transform(m, lam, lv, cfg.spot);
            g.diff[i] = gv - 1.0 / (p - lam * (lam - 1.0) * half_s2);
        } catch (const std::exception& e) {
            throw NodeError(i, p, "lambda = (" + std::to_string(lam.real()) + "," + std::to_string(lam.imag()) +
                                      "i): " + e.what());
        }
    });
    return g;
}

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double forward_black(double f, double k, double t, double vol) {
    if (vol <= 0.0 || t <= 0.0) return std::max(f - k, 0.0);
    const double sd = vol * std::sqrt(t);
    const double d1 = (std::log(f / k) + 0.5 * sd * sd) / sd;
    return f * norm_cdf(d1) - k * norm_cdf(d1 - sd);
}

}  // namespace

double forward_call_from_grid(const ModelParams& m, const GGrid& g, double k) {
    if (!(k > 0.0)) throw DomainError("call pricing: strike must be positive");
    const double lr = std::log(m.f0 / k);
    const std::size_t nl = g.lambdas.size();
    std::vector<cplx> factor(nl);
    for (std::size_t q = 0; q < nl; ++q) {
        const cplx lam = g.lambdas[q];
        factor[q] = k * std::exp(lam * lr) / (lam * (lam - 1.0));
    }
    double f = 0.0;
    for (std::size_t j = 0; j < g.pnodes.size(); ++j) {
        cplx F{0.0, 0.0};
        for (std::size_t q = 0; q < nl; ++q) F += g.at(j, q) * factor[q];
        F *= g.dc / (2.0 * pi);
        f += (g.pnodes[j].weight * F).imag();
    }
    return forward_black(m.f0, k, g.t, g.line.sigma_ref) + f;
}

double call_price(const ModelParams& m, double k, double t, double r, const PricingConfig& cfg) {
    if (!(k > 0.0)) throw DomainError("call pricing: strike must be positive");
    const auto g = build_g_grid(m, t, cfg);
    return std::exp(-r * t) * forward_call_from_grid(m, g, k);
}

std::vector<SmilePoint> smile(const ModelParams& m, std::span<const double> strikes, double t, double r,
                              const PricingConfig& cfg) {
    for (double k : strikes)
        if (!(k > 0.0)) throw DomainError("smile: strikes must be positive");
    const auto g = build_g_grid(m, t, cfg);
    const double disc = std::exp(-r * t);
    std::vector<SmilePoint> out;
    out.reserve(strikes.size());
    for (double k : strikes) {
        const double price = disc * forward_call_from_grid(m, g, k);
        double iv = nan;
        try {
            iv = implied_vol(price, m.f0, k, t, r);
        } catch (const DomainError&) {
        }
        out.push_back({k, price, iv});
    }
    return out;
}

double black_call(double f, double k, double t, double vol, double r) {
    if (!(f > 0.0 && k > 0.0)) throw DomainError("black_call: forward and strike must be positive");
    if (!(vol >= 0.0) || !(t >= 0.0)) throw DomainError("black_call: vol and t must be non-negative");
    return std::exp(-r * t) * forward_black(f, k, t, vol);
}

double implied_vol(double price, double f, double k, double t, double r) {
    if (!(t > 0.0)) throw DomainError("implied_vol: t must be positive");
    const double disc = std::exp(-r * t);
    const double lower = disc * std::max(f - k, 0.0);
    const double upper = disc * f;
    if (!(price > lower && price < upper))
        throw DomainError("implied_vol: price outside the no-arbitrage band");
    double lo = 1e-8, hi = 1.0;
    while (black_call(f, k, t, hi, r) < price) {
        hi *= 2.0;
        if (hi > 1e3) throw DomainError("implied_vol: no volatility reproduces the price");
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (black_call(f, k, t, mid, r) < price)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace alphahyper::pricing
