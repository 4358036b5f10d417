#pragma once

// Numerical inverse Laplace transforms.

#include <functional>
#include <vector>

#include "alphahyper/common.hpp"

namespace alphahyper::inversion {

using Transform = std::function<cplx(cplx)>;

// Talbot inversion on the optimized cotangent contour
//   p(theta) = shift + (N/t)(-0.6122 + 0.5017 theta cot(0.6407 theta) + 0.2645 i theta),
// midpoint rule with N nodes on (-pi, pi). Only the N/2 nodes in the upper
// half plane are evaluated; f is assumed real.
struct TalbotConfig {
    int node_count = 24;
    double contour_shift = 0.0;
    void validate() const;
};

struct TalbotNode {
    cplx p;       // transform argument
    cplx weight;  // f(t) = sum Im(weight * F(p))
};

std::vector<TalbotNode> talbot_nodes(double t, const TalbotConfig& cfg = {});
double talbot_invert(const Transform& F, double t, const TalbotConfig& cfg = {});
// Same, with all node evaluations handed to the parallel map.
double talbot_invert_parallel(const Transform& F, double t, const TalbotConfig& cfg = {});

// de Hoog-Knight-Stokes accelerated Fourier series on the Bromwich line
// Re(p) = gamma >= abscissa_floor. Used where the transform is only known
// right of a vertical line.
struct BromwichConfig {
    int order = 24;               // 2*order+1 transform evaluations
    double abscissa_floor = 0.0;  // no node has Re(p) below this
    double tolerance = 1e-12;     // target discretisation error
    double period_factor = 2.0;   // T = period_factor * t
    double max_growth = 27.0;     // reject when gamma * t exceeds this
    void validate() const;
};

struct BromwichResult {
    double value;
    double abscissa;
    double amplification;  // exp(gamma t): roundoff multiplier
};

BromwichResult bromwich_invert(const Transform& F, double t, const BromwichConfig& cfg = {});

// Strike-Mellin factor of the call payoff: moment / (lambda (lambda - 1)).
cplx mellin_call_transform(cplx lambda, cplx moment);

}  // namespace alphahyper::inversion
