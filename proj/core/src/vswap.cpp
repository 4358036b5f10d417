#include "alphahyper/vswap.hpp"

#include <algorithm>
#include <cmath>

#include "alphahyper/quadrature.hpp"
#include "alphahyper/specialfn.hpp"

namespace alphahyper::vswap {

using namespace specialfn;

GreenEvalParams GreenEvalParams::make(cplx lambda, double nu) {
    GreenEvalParams g;
    g.lambda = lambda;
    g.nu = nu;
    g.mu = std::sqrt(cplx(nu * nu, 0.0) + 4.0 * lambda);
    g.a1 = 1.0 + 0.5 * (g.mu + nu);
    g.b1 = 1.0 + g.mu;
    return g;
}

const char* to_string(KernelRoute r) { return r == KernelRoute::Series ? "series" : "quadrature"; }

namespace {

bool near_integer(cplx z, double tol) {
    return std::abs(z.imag()) < tol && std::abs(z.real() - std::round(z.real())) < tol;
}

// z = 0 is a non-positive integer collision of 1/(c + n) for some n >= 0
bool hits_nonpositive_integer(cplx z, double tol) {
    return near_integer(z, tol) && std::round(z.real()) <= 0.0;
}

cplx log_phi_or_psi_integrand(bool lower, cplx c, cplx A, cplx B, double z) {
    const cplx base = (c - 1.0) * std::log(z) - z;
    if (lower) return base + log_kummer_phi(A - 1.0, B, cplx(z, 0.0));
    return base + log_tricomi_psi(A - 1.0, B, cplx(z, 0.0));
}

}  // namespace

cplx log_lower_kummer_quadrature(cplx A, cplx B, cplx k, double y, double tol) {
    const cplx c = B - A + k;
    if (!(c.real() > 0.0)) throw DomainError("lower kernel: integral diverges at 0 (Re(B-A+k) <= 0)");
    const double ref = log_phi_or_psi_integrand(true, c, A, B, y).real();
    auto f = [&](double z) -> cplx {
        if (!(z > 0.0)) return {0.0, 0.0};
        const cplx l = log_phi_or_psi_integrand(true, c, A, B, z) - ref;
        return l.real() < -745.0 ? cplx(0.0, 0.0) : std::exp(l);
    };
    auto r = quad::tanh_sinh(f, 0.0, y, tol, 14);
    return ref + safe_log(r.value);
}

cplx log_upper_tricomi_quadrature(cplx A, cplx B, cplx k, double y, double tol) {
    const cplx c = B - A + k;
    double ref = -inf;
    for (int j = -16; j <= 40; ++j) {
        const double z = y + std::exp(0.25 * j);
        ref = std::max(ref, log_phi_or_psi_integrand(false, c, A, B, z).real());
    }
    ref = std::max(ref, log_phi_or_psi_integrand(false, c, A, B, y).real());
    auto f = [&](double z, double) -> cplx {
        const cplx l = log_phi_or_psi_integrand(false, c, A, B, z) - ref;
        return l.real() < -745.0 ? cplx(0.0, 0.0) : std::exp(l);
    };
    auto r = quad::exp_sinh(f, y, tol, 14);
    return ref + safe_log(r.value);
}

KernelEval lower_kummer_integral(cplx A, cplx B, cplx k, double y, const KernelOptions& opt) {
    if (!(y > 0.0)) throw DomainError("lower kernel: y must be positive");
    const cplx c = B - A + k;
    if (std::abs(c) < 1e-14) throw PoleError("lower kernel: B - A + k vanishes");
    KernelEval out;
    if (y <= opt.max_series_argument) {
        try {
            const auto h = generalized_hypergeometric_2f2(B - A + 1.0, c, B, c + 1.0, cplx(-y, 0.0), opt.series);
            if (h.max_term <= opt.cancellation_limit * std::abs(h.value)) {
                out.eval.log_value = c * std::log(y) - std::log(c) + safe_log(h.value);
                out.eval.terms_used = h.terms_used;
                out.eval.trunc_error = h.trunc_error / std::abs(h.value);
                out.route = KernelRoute::Series;
                return out;
            }
        } catch (const ConvergenceError&) {
        }
    }
    out.eval.log_value = log_lower_kummer_quadrature(A, B, k, y, opt.quad_tol);
    out.eval.terms_used = 1;
    out.eval.trunc_error = opt.quad_tol;
    out.route = KernelRoute::Quadrature;
    return out;
}

namespace {

struct Partial {
    cplx sum;
    double max_term;
    double last;
    int terms;
};

template <class Ratio>
Partial residue_sum(Ratio ratio, const SeriesOptions& opt) {
    cplx term{1.0, 0.0}, sum{1.0, 0.0};
    double mx = 1.0;
    int small = 0;
    for (int n = 0; n < opt.max_terms; ++n) {
        term *= ratio(static_cast<double>(n));
        sum += term;
        const double at = std::abs(term);
        mx = std::max(mx, at);
        if (at <= opt.rel_tol * std::abs(sum)) {
            if (++small >= 2) return {sum, mx, at, n + 2};
        } else {
            small = 0;
        }
    }
    throw ConvergenceError("upper kernel: residue series did not converge");
}

}  // namespace

KernelEval upper_tricomi_integral(cplx A, cplx B, cplx k, double y, const KernelOptions& opt) {
    if (!(y > 0.0)) throw DomainError("upper kernel: y must be positive");
    const cplx c1 = 1.0 + k - A;
    const cplx c2 = k + B - A;
    const double g = opt.collision_guard;
    KernelEval out;
    const bool collide = near_integer(B, g) || hits_nonpositive_integer(c1, g) || hits_nonpositive_integer(c2, g);
    if (!collide) {
        try {
            const double ly = std::log(y);
            const cplx ipi(0.0, pi);
            const cplx L0 = log_gamma(c2) + log_gamma(c1) + log_rgamma(k);
            const cplx L1 = ipi + c1 * ly + log_gamma(B - 1.0) + log_rgamma(A - 1.0) - std::log(c1);
            const cplx L2 = ipi + c2 * ly + log_gamma(1.0 - B) + log_rgamma(A - B) - std::log(c2);
            const auto s1 = residue_sum(
                [&](double n) { return -y * (A - 2.0 - n) / (B - 2.0 - n) * (c1 + n) / ((c1 + n + 1.0) * (n + 1.0)); },
                opt.series);
            const auto s2 = residue_sum(
                [&](double n) { return -y * (A - B - 1.0 - n) / (-B - n) * (c2 + n) / ((c2 + n + 1.0) * (n + 1.0)); },
                opt.series);
            const cplx l1 = L1 + safe_log(s1.sum);
            const cplx l2 = L2 + safe_log(s2.sum);
            const cplx total = log_add(L0, log_add(l1, l2));
            const double peak = std::max({L0.real(), L1.real() + std::log(s1.max_term), L2.real() + std::log(s2.max_term)});
            if (total.real() != -inf && peak - total.real() <= std::log(opt.cancellation_limit)) {
                out.eval.log_value = total;
                out.eval.terms_used = std::max(s1.terms, s2.terms);
                out.eval.trunc_error = std::max(std::exp(L1.real() - total.real()) * s1.last,
                                                std::exp(L2.real() - total.real()) * s2.last);
                out.route = KernelRoute::Series;
                return out;
            }
        } catch (const ConvergenceError&) {
        } catch (const PoleError&) {
        }
    }
    out.eval.log_value = log_upper_tricomi_quadrature(A, B, k, y, opt.quad_tol);
    out.eval.terms_used = 1;
    out.eval.trunc_error = opt.quad_tol;
    out.route = KernelRoute::Quadrature;
    return out;
}

namespace {

SeriesEval to_series_eval(const KernelEval& k) {
    SeriesEval s;
    s.value = safe_exp(k.eval.log_value);
    s.terms_used = std::max(1, k.eval.terms_used);
    s.trunc_error = k.eval.trunc_error * std::abs(s.value);
    s.max_term = std::abs(s.value);
    return s;
}

void check_threshold(const GreenEvalParams& g, double alpha) {
    const double ls = process::lambda_star(alpha, g.nu);
    if (!(g.lambda.real() > ls))
        throw DomainError("resolvent series requires Re(lambda) > lambda* = " + std::to_string(ls));
}

}  // namespace

SeriesEval i1_vswap(double x, const GreenEvalParams& g, double alpha, const KernelOptions& opt) {
    if (!(x > 0.0)) throw DomainError("i1_vswap: x must be positive");
    return to_series_eval(lower_kummer_integral(g.a1, g.b1, 2.0 / alpha, 1.0 / x, opt));
}

SeriesEval i2_vswap(double x, const GreenEvalParams& g, double alpha, const KernelOptions& opt) {
    if (!(x > 0.0)) throw DomainError("i2_vswap: x must be positive");
    check_threshold(g, alpha);
    return to_series_eval(upper_tricomi_integral(g.a1, g.b1, 2.0 / alpha, 1.0 / x, opt));
}

cplx green_u_lambda(double x, double y, const GreenEvalParams& g) {
    if (!(x > 0.0 && y > 0.0)) throw DomainError("green_u_lambda: x and y must be positive");
    const cplx a = g.a1 - 1.0;
    const cplx B = g.b1;
    auto log_phi1 = [&](double t) { return -a * std::log(t) + log_kummer_phi(a, B, cplx(1.0 / t, 0.0)); };
    auto log_phi2 = [&](double t) { return -a * std::log(t) + log_tricomi_psi(a, B, cplx(1.0 / t, 0.0)); };
    const cplx pre = log_gamma(a) - log_gamma(B) + (g.nu - 1.0) * std::log(y) - 1.0 / y;
    const cplx body = y <= x ? log_phi1(x) + log_phi2(y) : log_phi2(x) + log_phi1(y);
    return safe_exp(pre + body);
}

cplx log_resolvent_I_continued(double x, const GreenEvalParams& g, double alpha) {
    if (!(x > 0.0)) throw DomainError("resolvent_I: x must be positive");
    KernelOptions opt;
    opt.series.rel_tol = 1e-16;
    const double y = 1.0 / x;
    const cplx A = g.a1, B = g.b1, k = 2.0 / alpha;
    const auto i1 = lower_kummer_integral(A, B, k, y, opt);
    const auto i2 = upper_tricomi_integral(A, B, k, y, opt);
    const cplx lphi = log_kummer_phi(A - 1.0, B, cplx(y, 0.0), opt.series);
    const cplx lpsi = log_tricomi_psi(A - 1.0, B, cplx(y, 0.0));
    return log_gamma(A - 1.0) - log_gamma(B) + (A - 1.0) * std::log(y) +
           log_add(lphi + i2.eval.log_value, lpsi + i1.eval.log_value);
}

cplx log_resolvent_I(double x, const GreenEvalParams& g, double alpha) {
    if (!(x > 0.0)) throw DomainError("resolvent_I: x must be positive");
    check_threshold(g, alpha);
    return log_resolvent_I_continued(x, g, alpha);
}

cplx resolvent_I(double x, const GreenEvalParams& g, double alpha) {
    return safe_exp(log_resolvent_I(x, g, alpha));
}

VarianceSwapResult variance_swap_detailed(const ModelParams& p, double t, const inversion::BromwichConfig& cfg,
                                          AbscissaPolicy policy) {
    p.validate();
    if (!(t > 0.0)) throw DomainError("variance_swap: t must be positive");
    const auto sh = process::to_shiryaev(p);
    const double k = 2.0 / p.alpha;
    const double x = std::exp(-p.alpha * p.v0) / sh.q;
    const double nu = sh.nu;
    const double tau = t / sh.c;
    inversion::BromwichConfig c = cfg;
    const double series_floor = process::lambda_star(p.alpha, nu) + 1.0;
    bool continued = false;
    if (policy == AbscissaPolicy::SeriesRegion || std::max(cfg.abscissa_floor, series_floor) * tau <= cfg.max_growth) {
        c.abscissa_floor = std::max(cfg.abscissa_floor, series_floor);
    } else {
        continued = true;
    }
    auto F = [&](cplx lam) {
        return safe_exp(log_resolvent_I_continued(x, GreenEvalParams::make(lam, nu), p.alpha) - std::log(lam));
    };
    const auto r = inversion::bromwich_invert(F, tau, c);
    return {sh.c * std::exp(-k * std::log(sh.q)) * r.value / t, r.abscissa, r.amplification, continued};
}

double variance_swap(const ModelParams& p, double t, const inversion::BromwichConfig& cfg, AbscissaPolicy policy) {
    return variance_swap_detailed(p, t, cfg, policy).value;
}

}  // namespace alphahyper::vswap
