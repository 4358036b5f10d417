#include "alphahyper/process.hpp"

#include <algorithm>
#include <cmath>

#include "alphahyper/quadrature.hpp"

namespace alphahyper {

ModelParams ModelParams::from_variance(double alpha, double a, double b, double sigma, double rho,
                                       double V0, double f0) {
    if (!(V0 > 0.0)) throw DomainError("initial variance must be positive");
    return {alpha, a, b, sigma, rho, 0.5 * std::log(V0), f0};
}

void ModelParams::validate_paths() const {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (!(b > 0.0)) throw DomainError("b must be positive");
    if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (!(std::abs(rho) <= 1.0)) throw DomainError("rho must lie in [-1, 1]");
    if (!(f0 > 0.0)) throw DomainError("f0 must be positive");
    if (!std::isfinite(a) || !std::isfinite(v0)) throw DomainError("a and v0 must be finite");
}

void ModelParams::validate() const {
    validate_paths();
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
}

const char* to_string(MartingaleRule r) {
    switch (r) {
        case MartingaleRule::AlphaGE2: return "AlphaGE2";
        case MartingaleRule::RhoNonPositive: return "RhoNonPositive";
        case MartingaleRule::AlphaGT1: return "AlphaGT1";
        case MartingaleRule::AlphaEQ1_bGErhoSigma: return "AlphaEQ1_bGErhoSigma";
        case MartingaleRule::Fails: return "Fails";
    }
    return "?";
}

namespace process {

namespace {

void check_grid(std::span<const double> times, std::span<const double> w2) {
    if (times.empty() || times[0] != 0.0) throw DomainError("time grid must start at 0");
    if (w2.size() + 1 != times.size())
        throw DomainError("need exactly one Brownian increment per grid interval");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("time grid must be strictly increasing");
}

}  // namespace

VPath exact_v_path(const ModelParams& p, std::span<const double> times, std::span<const double> w2) {
    if (!(p.alpha > 0.0)) throw DomainError("alpha must be positive");
    if (!(p.sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    check_grid(times, w2);
    const double al = p.alpha;
    const double c = al * p.b * std::exp(al * p.v0);
    VPath out;
    out.v.reserve(times.size());
    out.v.push_back(p.v0);
    double x_prev = 0.0;
    double w = 0.0;
    if (c > 0.0) {
        // log K accumulated in log space so large alpha X never overflows
        double log_k = -inf;
        for (std::size_t i = 1; i < times.size(); ++i) {
            w += w2[i - 1];
            const double x = p.a * times[i] + p.sigma * w;
            const double dt = times[i] - times[i - 1];
            const double hi = std::max(al * x_prev, al * x);
            const double lo = std::min(al * x_prev, al * x);
            const double log_seg = std::log(0.5 * dt) + hi + std::log1p(std::exp(lo - hi));
            if (log_k == -inf) {
                log_k = log_seg;
            } else {
                const double m = std::max(log_k, log_seg);
                log_k = m + std::log(std::exp(log_k - m) + std::exp(log_seg - m));
            }
            const double arg = std::log(c) + log_k;
            const double log1p_ck = arg > 0.0 ? arg + std::log1p(std::exp(-arg)) : std::log1p(std::exp(arg));
            out.v.push_back(p.v0 + x - log1p_ck / al);
            x_prev = x;
        }
        return out;
    }
    double k = 0.0;
    double e_prev = 1.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        w += w2[i - 1];
        const double x = p.a * times[i] + p.sigma * w;
        const double dt = times[i] - times[i - 1];
        const double e = std::exp(al * x);
        const double k_new = k + 0.5 * dt * (e_prev + e);
        const double arg = 1.0 + c * k_new;
        if (!(arg > 0.0) || !std::isfinite(arg)) {
            // interpolate the hitting time of 1 + cK = 0 inside the step
            const double target = -1.0 / c;
            const double frac = (k_new != k) ? std::clamp((target - k) / (k_new - k), 0.0, 1.0) : 1.0;
            out.stopping_time = times[i - 1] + frac * dt;
            return out;
        }
        out.v.push_back(p.v0 + x - std::log(arg) / al);
        k = k_new;
        e_prev = e;
    }
    return out;
}

std::vector<double> euler_v_path(const ModelParams& p, std::span<const double> times,
                                 std::span<const double> w2) {
    check_grid(times, w2);
    std::vector<double> v(times.size());
    v[0] = p.v0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        v[i] = v[i - 1] + (p.a - p.b * std::exp(p.alpha * v[i - 1])) * dt + p.sigma * w2[i - 1];
    }
    return v;
}

double noiseless_variance(const ModelParams& p, double t) {
    const double al = p.alpha;
    const double s = std::exp(al * p.v0);  // V0^{alpha/2}
    // (e^{alpha a t} - 1)/a, with the a = 0 limit alpha t
    const double growth = p.a == 0.0 ? al * t : std::expm1(al * p.a * t) / p.a;
    const double denom_log = std::log1p(p.b * s * growth);
    return std::exp(2.0 * p.v0 + 2.0 * p.a * t - (2.0 / al) * denom_log);
}

double noiseless_integrated_variance(const ModelParams& p, double t) {
    if (t <= 0.0) return 0.0;
    if (p.alpha == 2.0) {
        const double k = p.a == 0.0 ? t : std::expm1(2.0 * p.a * t) / (2.0 * p.a);
        return std::log1p(2.0 * p.b * p.V0() * k) / (2.0 * p.b);
    }
    auto f = [&](double s) { return cplx(noiseless_variance(p, s), 0.0); };
    return quad::gauss_kronrod(f, 0.0, t, {1e-13, 0.0, 2000}).value.real();
}

ShiryaevParams to_shiryaev(const ModelParams& p) {
    const double d = p.alpha * p.sigma * p.sigma;
    if (!(d > 0.0)) throw DomainError("to_shiryaev: requires alpha > 0 and sigma > 0");
    // time scale from p C_{cu} = sqrt(2) D_u with p = alpha sigma
    return {-2.0 * p.a / d, 2.0 * p.b / d, 2.0 / (p.alpha * d)};
}

double z_moment(const ModelParams& p, int l, double t) {
    if (l < 1) throw DomainError("z_moment: l must be >= 1");
    const double al = p.alpha;
    const double m = al * p.b;
    const double n = 0.5 * al * al * p.sigma * p.sigma - al * p.a;
    const double pp = al * p.sigma;
    const int dim = l + 1;
    // M' = A M with A lower bidiagonal; M(t) = exp(A t) M(0)
    std::vector<double> A(static_cast<std::size_t>(dim * dim), 0.0);
    auto at = [&](std::vector<double>& X, int i, int j) -> double& {
        return X[static_cast<std::size_t>(i * dim + j)];
    };
    for (int k = 0; k <= l; ++k) {
        at(A, k, k) = (k * n + 0.5 * k * (k - 1) * pp * pp) * t;
        if (k > 0) at(A, k, k - 1) = k * m * t;
    }
    double norm = 0.0;
    for (int i = 0; i < dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < dim; ++j) row += std::abs(at(A, i, j));
        norm = std::max(norm, row);
    }
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (double& x : A) x *= scale;
    auto mul = [&](const std::vector<double>& X, const std::vector<double>& Y) {
        std::vector<double> Z(X.size(), 0.0);
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k <= i; ++k) {
                const double xik = X[static_cast<std::size_t>(i * dim + k)];
                if (xik == 0.0) continue;
                for (int j = 0; j <= k; ++j)
                    Z[static_cast<std::size_t>(i * dim + j)] += xik * Y[static_cast<std::size_t>(k * dim + j)];
            }
        return Z;
    };
    std::vector<double> E(A.size(), 0.0), term(A.size(), 0.0);
    for (int i = 0; i < dim; ++i) at(E, i, i) = at(term, i, i) = 1.0;
    for (int k = 1; k <= 30; ++k) {
        term = mul(term, A);
        for (double& x : term) x /= k;
        for (std::size_t i = 0; i < E.size(); ++i) E[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) E = mul(E, E);
    const double z0 = std::exp(-al * p.v0);
    double result = 0.0;
    double zp = 1.0;
    for (int j = 0; j <= l; ++j) {
        result += at(E, l, j) * zp;
        zp *= z0;
    }
    return result;
}

MartingaleVerdict martingale_classify(const ModelParams& p) {
    if (p.alpha >= 2.0) return {true, MartingaleRule::AlphaGE2, "alpha >= 2"};
    if (p.rho <= 0.0) return {true, MartingaleRule::RhoNonPositive, "alpha < 2 and rho <= 0"};
    if (p.alpha > 1.0) return {true, MartingaleRule::AlphaGT1, "1 < alpha < 2"};
    if (p.alpha == 1.0) {
        if (p.b >= p.rho * p.sigma)
            return {true, MartingaleRule::AlphaEQ1_bGErhoSigma, "alpha = 1 and b >= rho sigma"};
        return {false, MartingaleRule::Fails, "alpha = 1 with rho > 0 and b < rho sigma"};
    }
    return {false, MartingaleRule::Fails, "alpha < 1 with rho > 0"};
}

InvertedModel inverted_model(const ModelParams& p) {
    if (!martingale_classify(p).is_martingale)
        throw DomainError("inverted_model: the forward is not a martingale for these parameters");
    InvertedModel out;
    if (p.rho == 0.0) {
        out.kind = InversionKind::Identical;
        out.params = p;
        out.note = "rho = 0: the inverted model is the original one";
        return out;
    }
    if (p.alpha == 1.0) {
        ModelParams q = p;
        q.b = p.b - p.rho * p.sigma;
        out.kind = InversionKind::MeanReversionShift;
        out.params = q;
        out.degenerate = q.b == 0.0;
        out.note = out.degenerate ? "b = rho sigma: v is a drifted Brownian motion under the share measure"
                                  : "mean reversion b - rho sigma";
        return out;
    }
    out.kind = InversionKind::OutsideFamily;
    out.note = "inverted dynamics are outside the alpha-hypergeometric family";
    return out;
}

double short_term_ev(const ModelParams& p, double t) {
    const double V0 = p.V0();
    const double slope = 2.0 * p.a + 2.0 * p.sigma * p.sigma - 2.0 * p.b * std::exp(p.alpha * p.v0);
    return V0 * (1.0 + slope * t);
}

double short_term_vs(const ModelParams& p, double t) { return short_term_ev(p, 0.5 * t); }

double vs_upper_bound_alpha2(const ModelParams& p, double t) {
    if (p.alpha != 2.0) throw DomainError("vs_upper_bound_alpha2: requires alpha = 2");
    if (t < 0.0) throw DomainError("vs_upper_bound_alpha2: t must be non-negative");
    const double V0 = p.V0();
    if (t == 0.0) return V0;
    const double k = 2.0 * p.a + 2.0 * p.sigma * p.sigma;
    const double growth = k == 0.0 ? t : std::expm1(k * t) / k;
    return std::log1p(2.0 * p.b * V0 * growth) / (2.0 * p.b * t);
}

double long_term_limit(const ModelParams& p) {
    if (!(p.a > 0.0)) throw DomainError("long_term_limit: requires a > 0");
    const double d = p.alpha * p.sigma * p.sigma;
    const double mu = 2.0 * p.a / d;
    const double q = 2.0 * p.b / d;
    const double k = 2.0 / p.alpha;
    return std::exp(-k * std::log(q) + std::lgamma(mu + k) - std::lgamma(mu));
}

MellinStrip mellin_strip(const ModelParams& p) {
    const double s = p.sigma;
    const double A = -s * s * (1.0 - p.rho * p.rho);
    const double B = s * s - 2.0 * p.b * p.rho * s;
    const double C = p.b * p.b;
    if (A == 0.0) {
        if (B == 0.0) return {-inf, inf};
        const double r = -C / B;
        return B > 0.0 ? MellinStrip{r, inf} : MellinStrip{-inf, r};
    }
    const double disc = std::sqrt(B * B - 4.0 * A * C);
    const double q = -0.5 * (B + std::copysign(disc, B));
    const double r1 = q / A;
    const double r2 = C / q;
    return {std::min(r1, r2), std::max(r1, r2)};
}

double lambda_star(double alpha, double nu) { return 4.0 / (alpha * alpha) + 2.0 * std::abs(nu) / alpha; }

}  // namespace process
}  // namespace alphahyper
