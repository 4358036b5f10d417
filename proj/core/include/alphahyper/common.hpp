#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace alphahyper {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();
inline constexpr double inf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation at a pole of Gamma, a Pochhammer denominator or 1/(l(l-1)).
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Series or quadrature failed to reach tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Requested inversion cannot be carried out reliably on an admissible contour.
class ContourError : public Error {
public:
    using Error::Error;
};

// Failure while evaluating a transform at one inversion node.
class NodeError : public Error {
public:
    NodeError(std::size_t index, cplx node, const std::string& what)
        : Error("node " + std::to_string(index) + " (" + std::to_string(node.real()) + "," +
                std::to_string(node.imag()) + "i): " + what),
          index_(index), node_(node) {}
    std::size_t index() const noexcept { return index_; }
    cplx node() const noexcept { return node_; }

private:
    std::size_t index_;
    cplx node_;
};

struct SeriesOptions {
    double rel_tol = 1e-13;
    int max_terms = 10000;
};

// Result of a summed series. trunc_error is the magnitude of the last added
// term; max_term is the largest term seen, so max_term/|value| gauges
// cancellation.
struct SeriesEval {
    cplx value{0.0, 0.0};
    int terms_used = 0;
    double trunc_error = 0.0;
    double max_term = 0.0;
};

// Same as SeriesEval but the value is held as a complex logarithm so that
// results far outside double range can be combined safely.
struct LogSeriesEval {
    cplx log_value{-inf, 0.0};
    int terms_used = 0;
    double trunc_error = 0.0;  // relative to |value|
    bool is_zero() const noexcept { return log_value.real() == -inf; }
};

inline cplx safe_exp(cplx l) {
    if (l.real() == -inf) return {0.0, 0.0};
    return std::exp(l);
}

inline cplx safe_log(cplx z) {
    if (z == cplx(0.0, 0.0)) return {-inf, 0.0};
    return std::log(z);
}

// log(exp(x) + exp(y)) without overflow.
inline cplx log_add(cplx x, cplx y) {
    if (x.real() == -inf) return y;
    if (y.real() == -inf) return x;
    if (x.real() < y.real()) std::swap(x, y);
    const cplx r = std::exp(y - x);
    return x + std::log(1.0 + r);
}

inline bool near_nonpositive_integer(cplx z, double tol = 0.0) {
    if (std::abs(z.imag()) > tol) return false;
    const double n = std::round(z.real());
    return n <= 0.0 && std::abs(z.real() - n) <= tol;
}

}  // namespace alphahyper
