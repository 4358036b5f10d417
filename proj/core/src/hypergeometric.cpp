#include <algorithm>
#include <cmath>
#include <vector>

#include "alphahyper/quadrature.hpp"
#include "alphahyper/specialfn.hpp"

namespace alphahyper::specialfn {

namespace {

// Generic pFq-style summation driven by a term-ratio callback.
template <class Ratio>
SeriesEval sum_series(Ratio ratio, const SeriesOptions& opt, const char* name) {
    SeriesEval out;
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    double max_term = 1.0;
    int small = 0;
    for (int n = 0; n < opt.max_terms; ++n) {
        term *= ratio(n);
        sum += term;
        const double at = std::abs(term);
        max_term = std::max(max_term, at);
        if (at <= opt.rel_tol * std::abs(sum)) {
            if (++small >= 2) {
                out.value = sum;
                out.terms_used = n + 2;
                out.trunc_error = at;
                out.max_term = max_term;
                return out;
            }
        } else {
            small = 0;
        }
    }
    throw ConvergenceError(std::string(name) + ": series did not converge within term cap");
}

}  // namespace

SeriesEval kummer_phi_series(cplx a, cplx b, cplx z, const SeriesOptions& opt) {
    if (near_nonpositive_integer(b)) throw PoleError("kummer_phi: b is a non-positive integer");
    if (z == cplx(0.0, 0.0)) return {cplx(1.0, 0.0), 1, 0.0, 1.0};
    return sum_series(
        [&](int n) {
            const double k = n;
            return (a + k) / ((b + k) * (k + 1.0)) * z;
        },
        opt, "kummer_phi");
}

SeriesEval kummer_phi(cplx a, cplx b, cplx z, const SeriesOptions& opt) {
    if (z.real() < 0.0) {
        auto r = kummer_phi_series(b - a, b, -z, opt);
        const cplx e = std::exp(z);
        r.value *= e;
        r.trunc_error *= std::abs(e);
        r.max_term *= std::abs(e);
        return r;
    }
    return kummer_phi_series(a, b, z, opt);
}

namespace {

// Power series summed with a floating exponent so that e^{|z|}-sized
// partial sums never overflow.
cplx log_phi_scaled(cplx a, cplx b, cplx z, const SeriesOptions& opt) {
    if (near_nonpositive_integer(b)) throw PoleError("kummer_phi: b is a non-positive integer");
    constexpr double big = 1e200;
    double scale = 0.0;
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    int small = 0;
    for (int n = 0; n < opt.max_terms; ++n) {
        const double k = n;
        term *= (a + k) / ((b + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(sum) > big) {
            term /= big;
            sum /= big;
            scale += std::log(big);
        }
        if (std::abs(term) <= opt.rel_tol * std::abs(sum)) {
            if (++small >= 2) return scale + safe_log(sum);
        } else {
            small = 0;
        }
    }
    throw ConvergenceError("kummer_phi: series did not converge within term cap");
}

}  // namespace

cplx log_kummer_phi(cplx a, cplx b, cplx z, const SeriesOptions& opt) {
    if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
    if (z.real() < 0.0) return z + log_phi_scaled(b - a, b, -z, opt);
    return log_phi_scaled(a, b, z, opt);
}

SeriesEval generalized_hypergeometric_2f2(cplx a1, cplx a2, cplx b1, cplx b2, cplx z,
                                          const SeriesOptions& opt) {
    if (near_nonpositive_integer(b1) || near_nonpositive_integer(b2))
        throw PoleError("2F2: lower parameter is a non-positive integer");
    if (z == cplx(0.0, 0.0)) return {cplx(1.0, 0.0), 1, 0.0, 1.0};
    return sum_series(
        [&](int n) {
            const double k = n;
            return (a1 + k) * (a2 + k) / ((b1 + k) * (b2 + k) * (k + 1.0)) * z;
        },
        opt, "2F2");
}

const char* to_string(PsiRoute r) {
    switch (r) {
        case PsiRoute::Polynomial: return "polynomial";
        case PsiRoute::Asymptotic: return "asymptotic";
        case PsiRoute::Connection: return "connection";
        case PsiRoute::Integral: return "integral";
        case PsiRoute::Perturbed: return "perturbed";
    }
    return "?";
}

namespace {

struct Attempt {
    bool ok = false;
    cplx log_value{-inf, 0.0};
};

Attempt psi_asymptotic(cplx a, cplx b, cplx z) {
    const cplx c = a - b + 1.0;
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    double last = 1.0;
    for (int n = 0; n < 200; ++n) {
        const double k = n;
        term *= -(a + k) * (c + k) / ((k + 1.0) * z);
        const double at = std::abs(term);
        if (at > last && n > 0) return {};
        sum += term;
        if (at <= 1e-16 * std::abs(sum)) return {true, -a * std::log(z) + safe_log(sum)};
        last = at;
    }
    return {};
}

Attempt psi_connection(cplx a, cplx b, cplx z, double cancel_limit) {
    constexpr double lost = 1e3;
    SeriesEval p1, p2;
    try {
        p1 = kummer_phi(a, b, z);
        p2 = kummer_phi(a - b + 1.0, 2.0 - b, z);
    } catch (const Error&) {
        return {};
    }
    if (p1.max_term > lost * std::abs(p1.value) || p2.max_term > lost * std::abs(p2.value))
        return {};
    const cplx l1 = log_gamma(1.0 - b) + log_rgamma(a - b + 1.0) + safe_log(p1.value);
    const cplx l2 = log_gamma(b - 1.0) + log_rgamma(a) + (1.0 - b) * std::log(z) + safe_log(p2.value);
    const cplx s = log_add(l1, l2);
    const double peak = std::max(l1.real(), l2.real());
    if (peak - s.real() > std::log(cancel_limit)) return {};
    return {true, s};
}

// U(a,b,z) = 1/Gamma(a) int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt, Re a > 0.
// For complex parameters the real axis carries heavy cancellation, so the
// path runs straight to the saddle point and then horizontally to infinity.
cplx saddle_point(cplx a, cplx b, cplx z) {
    // z t^2 + (z - b + 2) t - (a - 1) = 0
    const cplx B = z - b + 2.0;
    const cplx d = std::sqrt(B * B + 4.0 * z * (a - 1.0));
    const cplx r1 = (-B + d) / (2.0 * z), r2 = (-B - d) / (2.0 * z);
    cplx t = std::abs(r1 + 1.0) > std::abs(r2 + 1.0) ? r1 : r2;
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) return {0.0, 0.0};
    // keep clear of the cut of (1+t)^{b-a-1} and of the cut of log t
    if (t.real() < -0.5) t = cplx(-0.5, t.imag());
    if (std::abs(t.imag()) < 1e-3 && t.real() < 0.0) t = cplx(std::abs(t), 0.0);
    return t;
}

cplx psi_integral_log(cplx a, cplx b, cplx z) {
    auto L = [&](cplx t) { return -z * t + (a - 1.0) * std::log(t) + (b - a - 1.0) * std::log(1.0 + t); };
    const cplx ts = saddle_point(a, b, z);
    const bool bent = std::abs(ts) > 1e-6;
    double ref = -inf;
    if (bent)
        for (int k = 1; k <= 16; ++k) ref = std::max(ref, L(ts * (k / 16.0)).real());
    for (int k = -60; k <= 60; ++k) ref = std::max(ref, L(ts + std::exp(0.25 * k)).real());
    auto scaled = [&](cplx t) -> cplx {
        const cplx l = L(t) - ref;
        if (l.real() < -745.0) return {0.0, 0.0};
        return std::exp(l);
    };
    cplx total{0.0, 0.0};
    if (bent) {
        auto seg = [&](double u) -> cplx { return u > 0.0 ? scaled(ts * u) * ts : cplx(0.0, 0.0); };
        total += quad::tanh_sinh(seg, 0.0, 1.0, 1e-13, 14).value;
    }
    auto ray = [&](double x, double) -> cplx { return scaled(ts + x); };
    total += quad::exp_sinh(ray, 0.0, 1e-13, 14).value;
    return ref + std::log(total) - log_gamma(a);
}

Attempt psi_integral(cplx a, cplx b, cplx z) {
    try {
        // t^{a-1} at the origin is too singular for the double-exponential
        // rule below Re a = 1/2
        if (a.real() > 0.5) return {true, psi_integral_log(a, b, z)};
        // recur downward in a from a region where the integral converges:
        // U(a-1) = -(b - 2a - z) U(a) - a(a-b+1) U(a+1)
        const int m = static_cast<int>(std::ceil(1.0 - a.real()));
        cplx a_hi = a + static_cast<double>(m);
        const cplx l0 = psi_integral_log(a_hi, b, z);
        const cplx l1 = psi_integral_log(a_hi + 1.0, b, z);
        cplx u_hi1 = std::exp(l1 - l0);  // U(a_hi+1)/U(a_hi)
        cplx u_hi = 1.0;
        double scale = l0.real();
        cplx phase = cplx(0.0, l0.imag());
        for (int k = 0; k < m; ++k) {
            const cplx u_lo = -(b - 2.0 * a_hi - z) * u_hi - a_hi * (a_hi - b + 1.0) * u_hi1;
            u_hi1 = u_hi;
            u_hi = u_lo;
            a_hi -= 1.0;
            const double mag = std::abs(u_hi);
            if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
                scale += std::log(mag);
                u_hi /= mag;
                u_hi1 /= mag;
            }
        }
        return {true, scale + phase + safe_log(u_hi)};
    } catch (const Error&) {
        return {};
    }
}

}  // namespace

PsiEval tricomi_psi_eval(cplx a, cplx b, cplx z, const PsiOptions& opt) {
    if (!(z.real() > 0.0)) throw DomainError("tricomi_psi: requires Re(z) > 0");
    if (near_nonpositive_integer(a) && !near_nonpositive_integer(b)) {
        // U(-m, b, z) = (-1)^m (b)_m Phi(-m, b, z)
        const int m = static_cast<int>(-std::round(a.real()));
        cplx poch{1.0, 0.0};
        for (int k = 0; k < m; ++k) poch *= -(b + static_cast<double>(k));
        return {safe_log(poch * kummer_phi_series(a, b, z).value), PsiRoute::Polynomial};
    }
    if (std::abs(z) >= opt.asymptotic_radius) {
        auto r = psi_asymptotic(a, b, z);
        if (r.ok) return {r.log_value, PsiRoute::Asymptotic};
    }
    const bool b_integerish = std::abs(b.imag()) < opt.integer_guard &&
                              std::abs(b.real() - std::round(b.real())) < opt.integer_guard;
    if (!b_integerish) {
        auto r = psi_connection(a, b, z, opt.cancellation_limit);
        if (r.ok) return {r.log_value, PsiRoute::Connection};
    }
    {
        auto r = psi_integral(a, b, z);
        if (r.ok) return {r.log_value, PsiRoute::Integral};
    }
    if (b_integerish) {
        const cplx bp = b + cplx(0.0, 2.0 * opt.integer_guard);
        auto r = psi_connection(a, bp, z, opt.cancellation_limit);
        if (r.ok) return {r.log_value, PsiRoute::Perturbed};
    }
    throw ConvergenceError("tricomi_psi: no evaluation route succeeded");
}

cplx log_tricomi_psi(cplx a, cplx b, cplx z, const PsiOptions& opt) {
    return tricomi_psi_eval(a, b, z, opt).log_value;
}

cplx tricomi_psi(cplx a, cplx b, cplx z, const PsiOptions& opt) {
    return safe_exp(log_tricomi_psi(a, b, z, opt));
}

cplx whittaker_m(cplx kappa, cplx eta, cplx z) {
    const cplx phi = kummer_phi(eta - kappa + 0.5, 1.0 + 2.0 * eta, z).value;
    return std::exp((eta + 0.5) * std::log(z) - 0.5 * z) * phi;
}

cplx whittaker_w(cplx kappa, cplx eta, cplx z) {
    const cplx lpsi = log_tricomi_psi(eta - kappa + 0.5, 1.0 + 2.0 * eta, z);
    return safe_exp((eta + 0.5) * std::log(z) - 0.5 * z + lpsi);
}

}  // namespace alphahyper::specialfn
