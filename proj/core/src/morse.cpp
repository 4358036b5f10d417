#include "alphahyper/morse.hpp"

#include <algorithm>
#include <cmath>

#include "alphahyper/quadrature.hpp"
#include "alphahyper/specialfn.hpp"
#include "alphahyper/vswap.hpp"

namespace alphahyper::morse {

using namespace specialfn;

namespace {

void require_alpha1(const ModelParams& m, const char* what) {
    m.validate();
    if (m.alpha != 1.0) throw DomainError(std::string(what) + ": requires alpha = 1");
}

double a_over_s2(const ModelParams& m) { return m.a / (m.sigma * m.sigma); }

}  // namespace

MellinCoeffs mellin_coeffs(const ModelParams& p, cplx lambda) {
    require_alpha1(p, "mellin_coeffs");
    const auto strip = process::mellin_strip(p);
    if (!(lambda.real() > strip.lambda_minus && lambda.real() < strip.lambda_plus))
        throw DomainError("mellin_coeffs: Re(lambda) = " + std::to_string(lambda.real()) +
                          " outside the strip (" + std::to_string(strip.lambda_minus) + ", " +
                          std::to_string(strip.lambda_plus) + ")");
    const double s = p.sigma, s2 = s * s, r = p.rho, b = p.b;
    MellinCoeffs c;
    c.lambda = lambda;
    c.lambda_minus = strip.lambda_minus;
    c.lambda_plus = strip.lambda_plus;
    c.alpha0 = lambda * r / s;
    c.alpha1 = -lambda * r / s * (p.a + 0.5 * s2);
    c.alpha2_sq = -lambda * lambda * (1.0 - r * r) - 2.0 * b * r * lambda / s + lambda;
    c.beta0 = (lambda * r * s - b) / s2;
    c.beta1 = (b - lambda * r * s) * (p.a / s2 + 0.5);
    const cplx poly = (lambda * r * s - b) * (lambda * r * s - b) + s2 * lambda * (1.0 - lambda);
    c.beta2_sq = poly / s2;
    c.nu1 = c.beta1 / s2;
    c.nu2 = std::sqrt(poly) / s2;
    c.delta = -0.5 + c.beta0 / (2.0 * c.nu2);
    return c;
}

LaplaceVar LaplaceVar::make(const ModelParams& m, cplx p) {
    const double s2 = m.sigma * m.sigma;
    const double as = m.a / s2;
    return {p, std::sqrt(as * as + 2.0 * p / s2)};
}

cplx log_green_G(double v, double y, const LaplaceVar& lv, cplx nu1, cplx nu2) {
    if (!(nu2.real() > 0.0)) throw DomainError("green_G: requires Re(nu2) > 0");
    const cplx eta = lv.eta;
    const cplx kappa = nu1 / nu2;
    const cplx a = eta - kappa + 0.5;
    if (near_nonpositive_integer(a, 1e-12)) throw PoleError("green_G: Gamma pole at eta - nu1/nu2 + 1/2");
    const cplx b = 1.0 + 2.0 * eta;
    const cplx zhi = 2.0 * nu2 * std::exp(std::max(v, y));
    const cplx zlo = 2.0 * nu2 * std::exp(std::min(v, y));
    const cplx lw = (eta + 0.5) * std::log(zhi) - 0.5 * zhi + log_tricomi_psi(a, b, zhi);
    const cplx lm = (eta + 0.5) * std::log(zlo) - 0.5 * zlo + log_kummer_phi(a, b, zlo);
    return log_gamma(a) - std::log(nu2) - log_gamma(b) - 0.5 * (v + y) + lw + lm;
}

cplx green_G(double v, double y, const LaplaceVar& lv, cplx nu1, cplx nu2) {
    return safe_exp(log_green_G(v, y, lv, nu1, nu2));
}

cplx log_laplace_vol_moment(const ModelParams& m, cplx theta, const LaplaceVar& lv) {
    require_alpha1(m, "laplace_vol_moment");
    const double s2 = m.sigma * m.sigma;
    const double as = a_over_s2(m);
    const cplx eta = lv.eta;
    if (!((eta + as + theta).real() > 0.0))
        throw DomainError("laplace_vol_moment: transform diverges (Re(eta + a/sigma^2 + theta) <= 0)");
    const double nu2 = m.b / s2;
    const double z0 = 2.0 * nu2 * std::exp(m.v0);
    const cplx A = eta - as + 1.0;
    const cplx B = 1.0 + 2.0 * eta;
    if (near_nonpositive_integer(A - 1.0, 1e-12)) throw PoleError("laplace_vol_moment: Gamma pole at eta - a/sigma^2");
    vswap::KernelOptions ko;
    ko.series.rel_tol = 1e-15;
    const auto j1 = vswap::lower_kummer_integral(A, B, theta, z0, ko);
    const auto j2 = vswap::upper_tricomi_integral(A, B, theta, z0, ko);
    const cplx lphi = log_kummer_phi(A - 1.0, B, cplx(z0, 0.0));
    const cplx lpsi = log_tricomi_psi(A - 1.0, B, cplx(z0, 0.0));
    const double ln2 = std::log(2.0);
    const cplx pre = (eta + 1.0 - as - theta) * ln2 + (eta - as - theta) * std::log(nu2) + log_gamma(A - 1.0) -
                     std::log(s2) - log_gamma(B) + (eta - as) * m.v0;
    return pre + log_add(lphi + j2.eval.log_value, lpsi + j1.eval.log_value);
}

cplx laplace_vol_moment(const ModelParams& m, cplx theta, const LaplaceVar& lv) {
    return safe_exp(log_laplace_vol_moment(m, theta, lv));
}

double variance_swap_alpha1(const ModelParams& m, double t, const inversion::TalbotConfig& cfg) {
    require_alpha1(m, "variance_swap_alpha1");
    if (!(t > 0.0)) throw DomainError("variance_swap_alpha1: t must be positive");
    auto F = [&](cplx p) { return safe_exp(log_laplace_vol_moment(m, 2.0, LaplaceVar::make(m, p)) - std::log(p)); };
    return inversion::talbot_invert(F, t, cfg) / t;
}

const char* to_string(SpotRoute r) {
    switch (r) {
        case SpotRoute::Series: return "series";
        case SpotRoute::Kernel: return "kernel";
        case SpotRoute::Residue: return "residue";
        case SpotRoute::Quadrature: return "quadrature";
    }
    return "?";
}

namespace {

struct SpotShape {
    cplx s;    // z exponent is s - 1
    cplx aa1;  // first Kummer parameter, aa - 1
    cplx bb;
};

SpotShape shape(const ModelParams& m, const MellinCoeffs& mc, const LaplaceVar& lv) {
    const cplx eta = lv.eta;
    return {eta + a_over_s2(m), eta - mc.nu1 / mc.nu2 + 0.5, 1.0 + 2.0 * eta};
}

// scaled j_n = int_0^1 u^{s+n-1} e^{w u} du, n = 0..count-1
std::vector<cplx> unit_term_integrals(cplx s, cplx w, int count) {
    if (!(s.real() > 0.0)) throw DomainError("i1_spot: requires Re(eta + a/sigma^2) > 0");
    const int extra = 60 + static_cast<int>(3.0 * std::abs(w));
    const int top = count + extra;
    const cplx ew = std::exp(w);
    cplx j = ew / (s + static_cast<double>(top));
    std::vector<cplx> out(count);
    for (int n = top - 1; n >= 0; --n) {
        j = (ew - w * j) / (s + static_cast<double>(n));
        if (n < count) out[n] = j;
    }
    return out;
}

}  // namespace

std::vector<cplx> i1_term_integrals(cplx s, cplx delta, cplx z0, int count) {
    auto j = unit_term_integrals(s, delta * z0, count);
    const cplx lz = std::log(z0);
    for (int n = 0; n < count; ++n) j[n] *= std::exp((s + static_cast<double>(n)) * lz);
    return j;
}

namespace {

// log j(n) for j(n) = int_{z0}^inf z^{c-1+n} e^{-w z} dz
std::vector<cplx> log_upper_terms(cplx c, cplx w, cplx z0, int count) {
    if (!(w.real() > 0.0)) throw DomainError("i2_spot: residue route requires Re(delta + 1) < 0");
    std::vector<cplx> out(count);
    const cplx lz = std::log(z0);
    const cplx wz = w * z0;
    cplx lj = log_upper_incomplete_gamma(c, wz) - c * std::log(w);
    for (int n = 0; n < count; ++n) {
        out[n] = lj;
        const cplx cn = c + static_cast<double>(n);
        // j(n+1) = (z0^{cn} e^{-w z0} + cn j(n)) / w
        lj = lj + std::log(std::exp(cn * lz - wz - lj) + cn) - std::log(w);
    }
    return out;
}

}  // namespace

std::vector<cplx> i2_term_integrals(cplx c, cplx w, cplx z0, int count) {
    auto l = log_upper_terms(c, w, z0, count);
    for (auto& x : l) x = safe_exp(x);
    return l;
}

namespace {

cplx log_i1_quadrature(const SpotShape& sh, cplx delta, cplx z0, double tol) {
    const cplx lz = std::log(z0);
    auto L = [&](double u) { return (sh.s - 1.0) * std::log(u) + delta * z0 * u + log_kummer_phi(sh.aa1, sh.bb, z0 * u); };
    double ref = -inf;
    for (int k = 1; k <= 32; ++k) ref = std::max(ref, L(k / 32.0).real());
    auto f = [&](double u) -> cplx {
        if (!(u > 0.0)) return {0.0, 0.0};
        const cplx l = L(u) - ref;
        return l.real() < -745.0 ? cplx(0.0, 0.0) : std::exp(l);
    };
    const auto r = quad::tanh_sinh(f, 0.0, 1.0, tol, 14);
    return sh.s * lz + ref + safe_log(r.value);
}

cplx log_i2_quadrature(const SpotShape& sh, cplx delta, cplx z0, double tol) {
    if (delta.real() > 0.0) throw DomainError("i2_spot: integral diverges (Re(delta) > 0)");
    const cplx lz = std::log(z0);
    auto L = [&](double u) {
        const cplx z = z0 * (1.0 + u);
        return (sh.s - 1.0) * std::log1p(u) + delta * z + log_tricomi_psi(sh.aa1, sh.bb, z);
    };
    double ref = L(0.0).real();
    for (int j = -16; j <= 40; ++j) ref = std::max(ref, L(std::exp(0.25 * j)).real());
    auto f = [&](double u, double) -> cplx {
        const cplx l = L(u) - ref;
        return l.real() < -745.0 ? cplx(0.0, 0.0) : std::exp(l);
    };
    const auto r = quad::exp_sinh(f, 0.0, tol, 14);
    return sh.s * lz + ref + safe_log(r.value);
}

}  // namespace

SpotIntegral i1_spot(const ModelParams& m, const MellinCoeffs& mc, const LaplaceVar& lv, cplx z0,
                     const SpotOptions& opt) {
    const auto sh = shape(m, mc, lv);
    if (!(z0.real() > 0.0)) throw DomainError("i1_spot: requires Re(z0) > 0");
    const cplx w = mc.delta * z0;
    SpotIntegral out;
    try {
        int count = 64;
        for (;;) {
            const auto j = unit_term_integrals(sh.s, w, count);
            cplx coef{1.0, 0.0}, sum{0.0, 0.0};
            double mx = 0.0, last = 0.0;
            int small = 0;
            bool done = false;
            int n = 0;
            for (; n < count; ++n) {
                if (n > 0) {
                    const double k = n - 1;
                    coef *= (sh.aa1 + k) / ((sh.bb + k) * (k + 1.0)) * z0;
                }
                const cplx term = coef * j[n];
                sum += term;
                last = std::abs(term);
                mx = std::max(mx, last);
                if (!std::isfinite(mx)) throw ConvergenceError("i1_spot: series overflow");
                if (last <= opt.series.rel_tol * std::abs(sum)) {
                    if (++small >= 2) {
                        done = true;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if (done) {
                if (mx > opt.cancellation_limit * std::abs(sum)) break;
                out.eval.log_value = sh.s * std::log(z0) + safe_log(sum);
                out.eval.terms_used = n + 1;
                out.eval.trunc_error = last / std::abs(sum);
                out.route = SpotRoute::Series;
                return out;
            }
            if (count >= opt.series.max_terms) throw ConvergenceError("i1_spot: series did not converge");
            count *= 2;
        }
    } catch (const ConvergenceError&) {
    }
    out.eval.log_value = log_i1_quadrature(sh, mc.delta, z0, opt.quad_tol);
    out.eval.terms_used = 1;
    out.eval.trunc_error = opt.quad_tol;
    out.route = SpotRoute::Quadrature;
    return out;
}

SpotRoute select_i2_route(const MellinCoeffs& mc, cplx z0, const SpotOptions& opt) {
    const cplx d1 = mc.delta + 1.0;
    if (std::abs(d1) < 1e-12 && std::abs(z0.imag()) <= 1e-14 * std::abs(z0)) return SpotRoute::Kernel;
    if (d1.real() < 0.0 && std::abs(d1) >= opt.residue_radius) return SpotRoute::Residue;
    return SpotRoute::Quadrature;
}

namespace {

struct Residue {
    bool ok = false;
    LogSeriesEval eval;
};

Residue i2_residue(const SpotShape& sh, double as, cplx eta, cplx delta, cplx z0, const SpotOptions& opt) {
    const cplx aa = sh.aa1 + 1.0, bb = sh.bb;
    if (std::abs(bb.imag()) < 1e-4 && std::abs(bb.real() - std::round(bb.real())) < 1e-4) return {};
    const cplx w = -(delta + 1.0);
    // j(-n) has exponent a/sigma^2 - eta - 1 + n, j(-n+1-bb) has s - 1 + n
    const cplx c1 = as - eta;
    const cplx c2 = sh.s;
    const cplx L1 = log_gamma(bb - 1.0) + log_rgamma(aa - 1.0);
    const cplx L2 = log_gamma(1.0 - bb) + log_rgamma(aa - bb);
    int count = 128;
    while (count <= opt.series.max_terms) {
        const auto lj1 = log_upper_terms(c1, w, z0, count);
        const auto lj2 = log_upper_terms(c2, w, z0, count);
        const double scale = std::max((L1 + lj1[0]).real(), (L2 + lj2[0]).real());
        cplx lc1 = L1, lc2 = L2;
        cplx sum{0.0, 0.0};
        double mx = 0.0, last = 0.0;
        int small = 0;
        for (int n = 0; n < count; ++n) {
            if (n > 0) {
                const double k = n - 1;
                lc1 += safe_log(-(aa - 2.0 - k) / ((bb - 2.0 - k) * (k + 1.0)));
                lc2 += safe_log(-(aa - bb - 1.0 - k) / ((-bb - k) * (k + 1.0)));
            }
            const cplx term = safe_exp(lc1 + lj1[n] - scale) + safe_exp(lc2 + lj2[n] - scale);
            sum += term;
            last = std::abs(term);
            mx = std::max(mx, last);
            if (!std::isfinite(mx) || mx > 1e250) return {};
            if (last <= opt.series.rel_tol * std::abs(sum)) {
                if (++small >= 2) {
                    if (mx > opt.cancellation_limit * std::abs(sum)) return {};
                    Residue r;
                    r.ok = true;
                    r.eval.log_value = scale + safe_log(sum);
                    r.eval.terms_used = n + 1;
                    r.eval.trunc_error = last / std::abs(sum);
                    return r;
                }
            } else {
                small = 0;
            }
        }
        count *= 2;
    }
    return {};
}

}  // namespace

SpotIntegral i2_spot(const ModelParams& m, const MellinCoeffs& mc, const LaplaceVar& lv, cplx z0,
                     const SpotOptions& opt) {
    const auto sh = shape(m, mc, lv);
    if (!(z0.real() > 0.0)) throw DomainError("i2_spot: requires Re(z0) > 0");
    SpotIntegral out;
    const auto route = select_i2_route(mc, z0, opt);
    if (route == SpotRoute::Kernel) {
        vswap::KernelOptions ko;
        ko.series = opt.series;
        ko.series.max_terms = std::max(ko.series.max_terms, 10000);
        const cplx aa = sh.aa1 + 1.0;
        const auto k = vswap::upper_tricomi_integral(aa, sh.bb, sh.s - (sh.bb - aa), z0.real(), ko);
        out.eval = k.eval;
        out.route = SpotRoute::Kernel;
        return out;
    }
    if (route == SpotRoute::Residue) {
        try {
            const auto r = i2_residue(sh, a_over_s2(m), lv.eta, mc.delta, z0, opt);
            if (r.ok) {
                out.eval = r.eval;
                out.route = SpotRoute::Residue;
                return out;
            }
        } catch (const ConvergenceError&) {
        } catch (const PoleError&) {
        }
    }
    out.eval.log_value = log_i2_quadrature(sh, mc.delta, z0, opt.quad_tol);
    out.eval.terms_used = 1;
    out.eval.trunc_error = opt.quad_tol;
    out.route = SpotRoute::Quadrature;
    return out;
}

cplx log_g_double_transform(const ModelParams& m, cplx lambda, const LaplaceVar& lv, const SpotOptions& opt) {
    const auto mc = mellin_coeffs(m, lambda);
    const double s2 = m.sigma * m.sigma;
    const double as = a_over_s2(m);
    const cplx eta = lv.eta;
    const auto sh = shape(m, mc, lv);
    if (near_nonpositive_integer(sh.aa1, 1e-12))
        throw PoleError("g_double_transform: Gamma pole at eta - nu1/nu2 + 1/2");
    const double ev0 = std::exp(m.v0);
    const cplx z0 = 2.0 * mc.nu2 * ev0;
    const auto i1 = i1_spot(m, mc, lv, z0, opt);
    const auto i2 = i2_spot(m, mc, lv, z0, opt);
    const cplx lphi = log_kummer_phi(sh.aa1, sh.bb, z0);
    const cplx lpsi = log_tricomi_psi(sh.aa1, sh.bb, z0);
    const cplx pre = (eta + 1.0 - as) * std::log(2.0) + (eta - as) * std::log(mc.nu2) + log_gamma(sh.aa1) -
                     std::log(s2) - log_gamma(sh.bb) + (eta - as) * m.v0 +
                     (m.b / s2 - lambda * m.rho / m.sigma - mc.nu2) * ev0;
    return pre + log_add(lphi + i2.eval.log_value, lpsi + i1.eval.log_value);
}

cplx g_double_transform(const ModelParams& m, cplx lambda, const LaplaceVar& lv, const SpotOptions& opt) {
    return safe_exp(log_g_double_transform(m, lambda, lv, opt));
}

double martingale_identity_residual(const ModelParams& m, std::span<const double> p_values) {
    require_alpha1(m, "martingale_identity_residual");
    double worst = 0.0;
    const bool check_one = m.b >= m.rho * m.sigma;
    for (double p : p_values) {
        if (!(p > 0.0)) throw DomainError("martingale_identity_residual: p must be positive");
        const auto lv = LaplaceVar::make(m, p);
        worst = std::max(worst, std::abs(p * g_double_transform(m, 0.0, lv) - 1.0));
        if (check_one) worst = std::max(worst, std::abs(p * g_double_transform(m, 1.0, lv) - 1.0));
    }
    return worst;
}

}  // namespace alphahyper::morse
