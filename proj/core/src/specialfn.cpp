#include "alphahyper/specialfn.hpp"

#include <array>
#include <cmath>

namespace alphahyper::specialfn {

namespace {

constexpr double half_log_2pi = 0.91893853320467274178032973640562;
constexpr double log_pi = 1.14472988584940017414342735135306;

// B_{2k} / (2k (2k-1)) for k = 1..8
constexpr std::array<double, 8> stirling = {
    1.0 / 12.0,          -1.0 / 360.0,       1.0 / 1260.0,         -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,  1.0 / 156.0,          -3617.0 / 122400.0};

bool is_pole(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx log_gamma_right(cplx z) {
    cplx shift{0.0, 0.0};
    while (std::abs(z) < 12.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const cplx w = 1.0 / z;
    const cplx w2 = w * w;
    cplx series{0.0, 0.0};
    cplx p = w;
    for (double c : stirling) {
        series += c * p;
        p *= w2;
    }
    return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift;
}

}  // namespace

cplx log1p(cplx z) {
    if (std::abs(z) < 1e-4) return z * (1.0 - z * (0.5 - z * (1.0 / 3.0 - 0.25 * z)));
    return std::log(1.0 + z);
}

cplx log_sin_pi(cplx z) {
    // reduce the real part to (-1, 1] so that pi * x stays exact enough
    const double x = z.real() - 2.0 * std::round(0.5 * z.real());
    const double y = z.imag();
    const cplx zr(x, y);
    if (std::abs(y) < 15.0) return std::log(std::sin(pi * zr));
    const cplx i(0.0, 1.0);
    if (y > 0.0) return std::log(0.5 * i) - i * pi * zr + log1p(-std::exp(2.0 * i * pi * zr));
    return std::log(-0.5 * i) + i * pi * zr + log1p(-std::exp(-2.0 * i * pi * zr));
}

cplx log_gamma(cplx z) {
    if (is_pole(z)) throw PoleError("log_gamma: pole at non-positive integer");
    if (z.imag() == 0.0 && z.real() > 0.0) return {std::lgamma(z.real()), 0.0};
    if (z.real() < -200.0) return log_pi - log_sin_pi(z) - log_gamma_right(1.0 - z);
    // upward recurrence keeps the branch continuous off the negative real axis
    cplx shift{0.0, 0.0};
    while (z.real() < 0.5) {
        shift += std::log(z);
        z += 1.0;
    }
    return log_gamma_right(z) - shift;
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
    if (is_pole(z)) return {0.0, 0.0};
    return std::exp(-log_gamma(z));
}

cplx log_rgamma(cplx z) {
    if (is_pole(z)) return {-inf, 0.0};
    return -log_gamma(z);
}

namespace {

constexpr int max_gamma_iter = 20000;

// sum_k x^k / ((s)_{k+1}); gamma(s, x) = x^s e^{-x} times this.
cplx lower_series(cplx s, cplx x) {
    cplx term = 1.0 / s;
    cplx sum = term;
    for (int k = 1; k < max_gamma_iter; ++k) {
        term *= x / (s + static_cast<double>(k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
    }
    throw ConvergenceError("incomplete gamma series did not converge");
}

// Modified Lentz continued fraction; Gamma(s, x) = x^s e^{-x} times this.
cplx upper_fraction(cplx s, cplx x) {
    const double tiny = 1e-300;
    cplx b = x + 1.0 - s;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < max_gamma_iter; ++i) {
        const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

bool use_fraction(cplx s, cplx x) {
    return x.real() > 0.0 && std::abs(x) > 1.5 && std::abs(x) > std::abs(s) - 1.0 + 1.5;
}

double pole_distance(cplx s) {
    if (s.real() > 0.5) return inf;
    const double n = std::round(s.real());
    return std::abs(s - cplx(n, 0.0));
}

}  // namespace

cplx log_lower_incomplete_gamma(cplx s, cplx x) {
    if (x == cplx(0.0, 0.0)) return {-inf, 0.0};
    if (use_fraction(s, x) && s.real() > 0.0) {
        const cplx lg = log_gamma(s);
        const cplx lu = -x + s * std::log(x) + std::log(upper_fraction(s, x));
        return lg + log1p(-std::exp(lu - lg));
    }
    return s * std::log(x) - x + std::log(lower_series(s, x));
}

cplx lower_incomplete_gamma(cplx s, cplx x) {
    if (s.real() <= 0.0) throw DomainError("lower_incomplete_gamma: requires Re(s) > 0");
    if (x == cplx(0.0, 0.0)) return {0.0, 0.0};
    return std::exp(log_lower_incomplete_gamma(s, x));
}

cplx lower_incomplete_gamma(cplx s, double x) {
    if (x < 0.0) throw DomainError("lower_incomplete_gamma: requires x >= 0");
    return lower_incomplete_gamma(s, cplx(x, 0.0));
}

cplx log_upper_incomplete_gamma(cplx s, cplx x) {
    if (x.real() <= 0.0) throw DomainError("upper_incomplete_gamma: requires Re(x) > 0");
    if (use_fraction(s, x) || pole_distance(s) < 1e-3)
        return -x + s * std::log(x) + std::log(upper_fraction(s, x));
    const cplx lg = log_gamma(s);
    const cplx ll = s * std::log(x) - x + std::log(lower_series(s, x));
    // Gamma(s) - gamma(s,x) in log form
    return lg + std::log(1.0 - std::exp(ll - lg));
}

cplx upper_incomplete_gamma(cplx s, cplx x) { return std::exp(log_upper_incomplete_gamma(s, x)); }

cplx upper_incomplete_gamma(cplx s, double x) {
    if (x <= 0.0) throw DomainError("upper_incomplete_gamma: requires x > 0");
    return upper_incomplete_gamma(s, cplx(x, 0.0));
}

}  // namespace alphahyper::specialfn
