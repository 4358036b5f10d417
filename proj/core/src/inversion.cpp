#include "alphahyper/inversion.hpp"

#include <cmath>

#include "alphahyper/parallel.hpp"

namespace alphahyper::inversion {

void TalbotConfig::validate() const {
    if (node_count < 8 || node_count % 2 != 0)
        throw DomainError("TalbotConfig: node_count must be even and >= 8");
    if (!(contour_shift >= 0.0) || !std::isfinite(contour_shift))
        throw DomainError("TalbotConfig: contour_shift must be a non-negative real");
}

std::vector<TalbotNode> talbot_nodes(double t, const TalbotConfig& cfg) {
    cfg.validate();
    if (!(t > 0.0)) throw DomainError("talbot: t must be positive");
    constexpr double s0 = -0.6122, s1 = 0.5017, al = 0.6407, s2 = 0.2645;
    const int n = cfg.node_count;
    const double c = n / t;
    const double h = 2.0 * pi / n;
    std::vector<TalbotNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n / 2));
    for (int j = 0; j < n / 2; ++j) {
        const double th = (j + 0.5) * h;
        const double cot = 1.0 / std::tan(al * th);
        const double sn = std::sin(al * th);
        const cplx p = cfg.contour_shift + c * cplx(s0 + s1 * th * cot, s2 * th);
        const cplx dp = c * cplx(s1 * (cot - al * th / (sn * sn)), s2);
        nodes.push_back({p, (2.0 / n) * std::exp(p * t) * dp});
    }
    return nodes;
}

double talbot_invert(const Transform& F, double t, const TalbotConfig& cfg) {
    const auto nodes = talbot_nodes(t, cfg);
    double f = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        cplx v;
        try {
            v = F(nodes[k].p);
        } catch (const NodeError&) {
            throw;
        } catch (const std::exception& e) {
            throw NodeError(k, nodes[k].p, e.what());
        }
        f += (nodes[k].weight * v).imag();
    }
    return f;
}

double talbot_invert_parallel(const Transform& F, double t, const TalbotConfig& cfg) {
    const auto nodes = talbot_nodes(t, cfg);
    std::vector<cplx> vals(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        try {
            vals[k] = F(nodes[k].p);
        } catch (const NodeError&) {
            throw;
        } catch (const std::exception& e) {
            throw NodeError(k, nodes[k].p, e.what());
        }
    });
    double f = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) f += (nodes[k].weight * vals[k]).imag();
    return f;
}

void BromwichConfig::validate() const {
    if (order < 4) throw DomainError("BromwichConfig: order must be >= 4");
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("BromwichConfig: tolerance in (0,1)");
    if (!(period_factor > 1.0)) throw DomainError("BromwichConfig: period_factor must exceed 1");
}

BromwichResult bromwich_invert(const Transform& F, double t, const BromwichConfig& cfg) {
    cfg.validate();
    if (!(t > 0.0)) throw DomainError("bromwich: t must be positive");
    const int M = cfg.order;
    const double T = cfg.period_factor * t;
    const double gam = std::max(cfg.abscissa_floor, -0.5 * std::log(cfg.tolerance) / T);
    if (gam * t > cfg.max_growth)
        throw ContourError("bromwich: abscissa " + std::to_string(gam) + " at t=" + std::to_string(t) +
                           " amplifies roundoff by exp(" + std::to_string(gam * t) + ")");
    const int K = 2 * M;
    std::vector<cplx> a(static_cast<std::size_t>(K + 1));
    std::vector<cplx> nodes(a.size());
    for (int k = 0; k <= K; ++k) nodes[static_cast<std::size_t>(k)] = cplx(gam, k * pi / T);
    parallel_for(a.size(), [&](std::size_t k) {
        try {
            a[k] = F(nodes[k]);
        } catch (const NodeError&) {
            throw;
        } catch (const std::exception& e) {
            throw NodeError(k, nodes[k], e.what());
        }
    });
    a[0] *= 0.5;

    // quotient-difference table
    constexpr double tiny = 1e-300;
    auto guard = [&](cplx z) { return std::abs(z) < tiny ? cplx(tiny, 0.0) : z; };
    std::vector<std::vector<cplx>> e(static_cast<std::size_t>(M + 1), std::vector<cplx>(a.size()));
    std::vector<std::vector<cplx>> q(static_cast<std::size_t>(M + 1), std::vector<cplx>(a.size()));
    for (int i = 0; i < K; ++i) q[1][i] = a[i + 1] / guard(a[i]);
    for (int r = 1; r <= M; ++r) {
        for (int i = 0; i <= K - 2 * r; ++i) e[r][i] = q[r][i + 1] - q[r][i] + e[r - 1][i + 1];
        if (r < M)
            for (int i = 0; i <= K - 2 * r - 1; ++i) q[r + 1][i] = q[r][i + 1] * e[r][i + 1] / guard(e[r][i]);
    }
    std::vector<cplx> d(a.size());
    d[0] = a[0];
    for (int m = 1; m <= M; ++m) {
        d[2 * m - 1] = -q[m][0];
        d[2 * m] = -e[m][0];
    }
    const cplx z = std::exp(cplx(0.0, pi * t / T));
    // continued-fraction convergents; index shifted by one (A[0] = A_{-1})
    std::vector<cplx> A(a.size() + 1), B(a.size() + 1);
    A[0] = 0.0;
    B[0] = 1.0;
    A[1] = d[0];
    B[1] = 1.0;
    for (int n = 1; n < K; ++n) {
        A[n + 1] = A[n] + d[n] * z * A[n - 1];
        B[n + 1] = B[n] + d[n] * z * B[n - 1];
    }
    const cplx h = 0.5 * (1.0 + z * (d[K - 1] - d[K]));
    const cplx R = -h * (1.0 - std::sqrt(1.0 + z * d[K] / (h * h)));
    A[K + 1] = A[K] + R * A[K - 1];
    B[K + 1] = B[K] + R * B[K - 1];
    const double amp = std::exp(gam * t);
    return {amp / T * (A[K + 1] / B[K + 1]).real(), gam, amp};
}

cplx mellin_call_transform(cplx lambda, cplx moment) {
    const cplx den = lambda * (lambda - 1.0);
    if (std::abs(lambda) < 1e-14 || std::abs(lambda - 1.0) < 1e-14)
        throw PoleError("mellin_call_transform: pole at lambda in {0, 1}");
    return moment / den;
}

}  // namespace alphahyper::inversion
