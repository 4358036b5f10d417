#pragma once

// Complex-valued quadrature rules used as fallbacks by the series routes.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "alphahyper/common.hpp"

namespace alphahyper::quad {

struct QuadResult {
    cplx value{0.0, 0.0};
    double error = 0.0;
    int evaluations = 0;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx k = fc * kronrod_w[7];
    cplx g = fc * gauss_w[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kronrod_x[j];
        const cplx s = f(c - dx) + f(c + dx);
        k += kronrod_w[j] * s;
        if (j % 2 == 1) g += gauss_w[j / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

// Globally adaptive 15-point Gauss-Kronrod on a finite interval.
template <class F>
QuadResult gauss_kronrod(F&& f, double a, double b, const QuadOptions& opt = {}) {
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    cplx total = first.value;
    double err = first.error;
    heap.push(first);
    int evals = 15;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals)
            throw ConvergenceError("gauss_kronrod: interval budget exhausted");
        auto s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b)) {
            // cannot split further in double precision; freeze it
            err -= s.error;
            s.error = 0.0;
            heap.push(s);
            if (heap.top().error == 0.0) break;
            continue;
        }
        auto l = detail::gk15(f, s.a, m);
        auto r = detail::gk15(f, m, s.b);
        evals += 30;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
    }
    // recompute from the pieces to shed accumulated update roundoff
    cplx sum{0.0, 0.0};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    return {sum, esum, evals};
}

// Integral over [a, inf) by Gauss-Kronrod on geometrically growing panels.
// Stops once a panel contributes less than tail_tol of the running total.
template <class F>
QuadResult gauss_kronrod_semi_infinite(F&& f, double a, double width, const QuadOptions& opt = {},
                                       double tail_tol = 1e-16, int max_panels = 200) {
    QuadResult out;
    double lo = a;
    double w = width;
    int quiet = 0;
    for (int i = 0; i < max_panels; ++i) {
        QuadOptions po = opt;
        po.abs_tol = std::max(opt.abs_tol, 0.1 * opt.rel_tol * std::abs(out.value));
        auto r = gauss_kronrod(f, lo, lo + w, po);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        if (std::abs(r.value) <= tail_tol * std::abs(out.value) &&
            std::abs(f(lo + w)) * w <= tail_tol * std::abs(out.value)) {
            if (++quiet >= 2) return out;
        } else {
            quiet = 0;
        }
        lo += w;
        w *= 2.0;
    }
    throw ConvergenceError("gauss_kronrod_semi_infinite: tail did not decay");
}

// Double-exponential rule on [a,b]; tolerant of integrable endpoint
// singularities. f receives the abscissa.
template <class F>
QuadResult tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-12, int max_level = 12) {
    const double half = 0.5 * (b - a);
    const double tmax = 4.0;
    auto contrib = [&](double t) -> cplx {
        const double u = 0.5 * pi * std::sinh(t);
        const double e = std::exp(2.0 * std::abs(u));
        const double d = (b - a) / (1.0 + e);
        if (!(d > 0.0)) return {0.0, 0.0};
        const double ch = std::cosh(u);
        const double w = half * 0.5 * pi * std::cosh(t) / (ch * ch);
        if (w == 0.0) return {0.0, 0.0};
        cplx s = f(a + d);
        if (t != 0.0) s += f(b - d);
        return w * s;
    };
    // t=0 node counted once: contrib handles both halves for t>0
    double h = 1.0;
    cplx sum = contrib(0.0);
    for (double t = h; t <= tmax; t += h) sum += contrib(t);
    cplx prev = sum * h;
    int evals = 0;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (double t = h; t <= tmax; t += 2.0 * h) sum += contrib(t);
        const cplx cur = sum * h;
        evals += static_cast<int>(tmax / h);
        const double diff = std::abs(cur - prev);
        if (level >= 3 && diff <= rel_tol * std::abs(cur)) return {cur, diff, evals};
        prev = cur;
    }
    throw ConvergenceError("tanh_sinh: no convergence");
}

// Double-exponential rule on [a, inf) for decaying integrands; singular
// behaviour at a is tolerated. f receives (x, x - a).
template <class F>
QuadResult exp_sinh(F&& f, double a, double rel_tol = 1e-12, int max_level = 12) {
    const double tmin = -4.5, tmax = 4.5;
    auto contrib = [&](double t) -> cplx {
        const double u = 0.5 * pi * std::sinh(t);
        const double d = std::exp(u);
        if (!(d > 0.0) || !std::isfinite(d)) return {0.0, 0.0};
        const cplx v = f(a + d, d);
        if (v == cplx(0.0, 0.0)) return v;
        const double w = 0.5 * pi * std::cosh(t) * d;
        return w * v;
    };
    double h = 0.5;
    cplx sum{0.0, 0.0};
    for (double t = tmin; t <= tmax + 1e-12; t += h) sum += contrib(t);
    cplx prev = sum * h;
    int evals = 0;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (double t = tmin + h; t <= tmax; t += 2.0 * h) sum += contrib(t);
        const cplx cur = sum * h;
        evals += static_cast<int>((tmax - tmin) / h);
        const double diff = std::abs(cur - prev);
        if (level >= 3 && diff <= rel_tol * std::abs(cur)) return {cur, diff, evals};
        prev = cur;
    }
    throw ConvergenceError("exp_sinh: no convergence");
}

}  // namespace alphahyper::quad
