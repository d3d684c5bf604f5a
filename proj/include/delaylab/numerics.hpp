#pragma once

#include <cstddef>
#include <functional>

namespace delaylab::numerics {

using ScalarFn = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    std::size_t max_intervals = std::size_t{1} << 14;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of h over [a, b].
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate is below max(abs_tol, rel_tol |value|). For a > b the result is
/// exactly the negation of the integral over [b, a]. Throws NumericsError on
/// a non-finite sample or when max_intervals is exhausted.
QuadResult integrate(const ScalarFn& h, double a, double b, const QuadOptions& opts = {});

inline QuadResult integrate(const ScalarFn& h, double a, double b, double rel_tol, double abs_tol) {
    return integrate(h, a, b, QuadOptions{rel_tol, abs_tol});
}

struct RootOptions {
    double tol = 1e-12;
    int max_iterations = 200;
};

/// Brent's method: inverse quadratic interpolation and secant steps, with a
/// bisection fallback. Requires F(a) F(b) <= 0; returns a point of a final
/// bracket narrower than `tol`. Throws NumericsError without a sign change or
/// after max_iterations.
double find_root(const ScalarFn& F, double a, double b, const RootOptions& opts = {});

inline double find_root(const ScalarFn& F, double a, double b, double tol) {
    return find_root(F, a, b, RootOptions{tol, 200});
}

}  // namespace delaylab::numerics
