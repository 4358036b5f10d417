#include "alphahyper/mc.hpp"

#include <algorithm>
#include <cmath>

#include "alphahyper/parallel.hpp"

namespace alphahyper::mc {

Philox::Counter Philox::block(Counter ctr, Key key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

double inverse_normal_cdf(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_normal_cdf: u must lie in (0, 1)");
    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

namespace {

// 53-bit uniform in (0, 1) from two 32-bit words.
double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
    const Philox::Counter ctr = {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                                 static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    const Philox::Key key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto r = Philox::block(ctr, key);
    return {inverse_normal_cdf(to_open_unit(r[0], r[1])), inverse_normal_cdf(to_open_unit(r[2], r[3]))};
}

void SimConfig::validate() const {
    if (n_paths < 2) throw DomainError("SimConfig: n_paths must be >= 2");
    if (n_steps < 1) throw DomainError("SimConfig: n_steps must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("SimConfig: horizon must be positive");
    if (antithetic && n_paths % 2 != 0) throw DomainError("SimConfig: antithetic runs need an even n_paths");
}

namespace {

constexpr std::int64_t block_size = 4096;

// Welford accumulators, merged across blocks with the pairwise update
struct Partial {
    std::vector<double> mean, m2;
    std::int64_t n = 0;
    std::int64_t overflow = 0;
};

// keeps f^2 summed over 1e9 paths inside double range
constexpr double log_f_limit = 340.0;

}  // namespace

FunctionalResult path_functional_mean(const ModelParams& p, const SimConfig& cfg, std::size_t n_outputs,
                                      const PathFunctional& fn) {
    p.validate_paths();
    cfg.validate();
    const int ns = cfg.n_steps;
    std::vector<double> times(ns + 1);
    for (int i = 0; i <= ns; ++i) times[i] = cfg.horizon * i / ns;
    const double dt = cfg.horizon / ns;
    const double sdt = std::sqrt(dt);
    const double rbar = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
    // with antithetics one sample is the mean over a pair sharing |increments|
    const std::int64_t n_samples = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const std::int64_t n_blocks = (n_samples + block_size - 1) / block_size;
    std::vector<Partial> parts(static_cast<std::size_t>(n_blocks));

    parallel_for(static_cast<std::size_t>(n_blocks), [&](std::size_t b) {
        Partial& part = parts[b];
        part.mean.assign(n_outputs, 0.0);
        part.m2.assign(n_outputs, 0.0);
        std::vector<double> z2(ns), zp(ns), w2(ns), logf(ns + 1), out(n_outputs), acc(n_outputs);
        const std::int64_t lo = static_cast<std::int64_t>(b) * block_size;
        const std::int64_t hi = std::min(n_samples, lo + block_size);
        for (std::int64_t s = lo; s < hi; ++s) {
            for (int i = 0; i < ns; ++i) {
                const auto g = normal_pair(cfg.seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i));
                z2[i] = g[0];
                zp[i] = g[1];
            }
            std::fill(acc.begin(), acc.end(), 0.0);
            const int legs = cfg.antithetic ? 2 : 1;
            bool overflow = false;
            for (int leg = 0; leg < legs; ++leg) {
                const double sign = leg == 0 ? 1.0 : -1.0;
                for (int i = 0; i < ns; ++i) w2[i] = sign * sdt * z2[i];
                auto path = process::exact_v_path(p, times, w2);
                if (path.stopping_time) {
                    overflow = true;
                    break;
                }
                const auto& v = path.v;
                logf[0] = std::log(p.f0);
                for (int i = 0; i < ns; ++i) {
                    const double vol = std::exp(v[i]);
                    const double dw1 = p.rho * w2[i] + rbar * sign * sdt * zp[i];
                    logf[i + 1] = logf[i] - 0.5 * vol * vol * dt + vol * dw1;
                }
                if (!std::isfinite(logf[ns]) || logf[ns] > log_f_limit) {
                    overflow = true;
                    break;
                }
                fn(PathView{times, v, logf}, out);
                for (std::size_t k = 0; k < n_outputs; ++k) acc[k] += out[k];
            }
            if (overflow) {
                ++part.overflow;
                continue;
            }
            ++part.n;
            for (std::size_t k = 0; k < n_outputs; ++k) {
                const double x = acc[k] / legs;
                const double d = x - part.mean[k];
                part.mean[k] += d / static_cast<double>(part.n);
                part.m2[k] += d * (x - part.mean[k]);
            }
        }
    });

    FunctionalResult res;
    std::vector<double> mean(n_outputs, 0.0), m2(n_outputs, 0.0);
    std::int64_t n = 0;
    for (const auto& part : parts) {
        res.overflow_paths += part.overflow;
        if (part.n == 0) continue;
        const double na = static_cast<double>(n), nb = static_cast<double>(part.n), nt = na + nb;
        for (std::size_t k = 0; k < n_outputs; ++k) {
            const double d = part.mean[k] - mean[k];
            mean[k] += d * nb / nt;
            m2[k] += part.m2[k] + d * d * na * nb / nt;
        }
        n += part.n;
    }
    if (n < 2) throw ConvergenceError("monte carlo: fewer than two usable paths");
    res.estimates.resize(n_outputs);
    for (std::size_t k = 0; k < n_outputs; ++k) {
        const double var = m2[k] / static_cast<double>(n - 1);
        res.estimates[k] = {mean[k], std::sqrt(var / static_cast<double>(n))};
    }
    return res;
}

SimStats simulate(const ModelParams& p, const SimConfig& cfg, std::span<const double> strikes, double r) {
    for (double k : strikes)
        if (!(k > 0.0)) throw DomainError("simulate: strikes must be positive");
    const std::vector<double> ks(strikes.begin(), strikes.end());
    const double disc = std::exp(-r * cfg.horizon);
    auto fn = [&](const PathView& path, std::span<double> out) {
        const std::size_t n = path.v.size();
        double integral = 0.0;
        double prev = std::exp(2.0 * path.v[0]);
        for (std::size_t i = 1; i < n; ++i) {
            const double cur = std::exp(2.0 * path.v[i]);
            integral += 0.5 * (path.times[i] - path.times[i - 1]) * (prev + cur);
            prev = cur;
        }
        const double f = std::exp(path.log_f[n - 1]);
        out[0] = prev;
        out[1] = integral / path.times[n - 1];
        out[2] = f;
        for (std::size_t k = 0; k < ks.size(); ++k) out[3 + k] = disc * std::max(f - ks[k], 0.0);
    };
    const auto res = path_functional_mean(p, cfg, 3 + ks.size(), fn);
    SimStats s;
    s.ev_t = res.estimates[0];
    s.vs_t = res.estimates[1];
    s.ef_t = res.estimates[2];
    for (std::size_t k = 0; k < ks.size(); ++k) s.call[ks[k]] = res.estimates[3 + k];
    s.overflow_paths = res.overflow_paths;
    s.seed = cfg.seed;
    return s;
}

}  // namespace alphahyper::mc
