#pragma once

// Monte Carlo for (v, f): exact v path, log-Euler for f.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "alphahyper/process.hpp"

namespace alphahyper::mc {

// Philox4x32-10 counter-based generator.
class Philox {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;
    static Counter block(Counter ctr, Key key);
};

// AS241 (PPND16) inverse normal CDF, |error| ~ 1e-16.
double inverse_normal_cdf(double u);

// Two standard normals for (stream, step) under a 64-bit seed.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t step);

struct SimConfig {
    std::int64_t n_paths = 100000;
    int n_steps = 100;
    double horizon = 1.0;
    std::uint64_t seed = 1;
    bool antithetic = false;
    void validate() const;
};

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

struct SimStats {
    Estimate ev_t;                         // V_t
    Estimate vs_t;                         // (1/t) int_0^t V ds, trapezoid
    Estimate ef_t;                         // f_t
    std::map<double, Estimate> call;       // strike -> e^{-rt} (f_t - k)^+
    std::int64_t overflow_paths = 0;       // paths dropped with log f above 340
    std::uint64_t seed = 0;
};

SimStats simulate(const ModelParams& p, const SimConfig& cfg, std::span<const double> strikes = {},
                  double r = 0.0);

// Generic path functional. times has n_steps+1 entries; v and log_f hold the
// path values at those times. The callback writes one value per output.
struct PathView {
    std::span<const double> times;
    std::span<const double> v;
    std::span<const double> log_f;
};
using PathFunctional = std::function<void(const PathView&, std::span<double>)>;

struct FunctionalResult {
    std::vector<Estimate> estimates;
    std::int64_t overflow_paths = 0;
};

// Paths run in blocks of 4096; block partial sums are merged in block order,
// so the result does not depend on the worker count. With antithetic set the
// standard error is computed over pair means.
FunctionalResult path_functional_mean(const ModelParams& p, const SimConfig& cfg, std::size_t n_outputs,
                                      const PathFunctional& fn);

}  // namespace alphahyper::mc
