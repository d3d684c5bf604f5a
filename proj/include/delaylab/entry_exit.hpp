#pragma once

#include <cstddef>
#include <vector>

#include "delaylab/model.hpp"
#include "delaylab/numerics.hpp"

namespace delaylab {

/// Singular-limit data of the delayed passage that starts at x0 < 0.
struct EntryExitSolution {
    double x0 = 0.0;
    double x1 = 0.0;        ///< exit point: integral of g/f from x0 to x1 vanishes
    double zeta0 = 0.0;     ///< delay exponent, integral of |g|/f from x0 to 0
    double tau1 = 0.0;      ///< slow travel time, integral of 1/f from x0 to x1
    double dx1_dx0 = 0.0;   ///< derivative of the entry-exit map
    double residual = 0.0;  ///< integral of g/f from x0 to x1 as computed
};

struct EntryExitOptions {
    numerics::QuadOptions quad{};
    double root_tol = 1e-12;
    /// Grid for the hypothesis check run before solving; 0 skips it.
    std::size_t hypothesis_grid = kDefaultHypothesisGrid;
};

/// Throws PreconditionError if x0 is outside (x_min, 0) or the model fails
/// its hypotheses, NoExitInWindow if the integral of g/f is still negative at
/// x_max.
EntryExitSolution solve_exit(const Model& m, double x0, const EntryExitOptions& opts = {});

/// Integrals along the reduced flow on z = 0.
///   zeta_minus(x) = int_{x0}^{x} -g/f,    tau_minus(x) = tau0_hat + int_{x0}^{x} 1/f
///   zeta_plus(x)  = int_{x}^{x1_hat} g/f, tau_plus(x)  = tau1 - int_{x}^{x1_hat} 1/f
double zeta_minus(const Model& m, double x0, double x, const numerics::QuadOptions& q = {});
double tau_minus(const Model& m, double x0, double x, double tau0_hat = 0.0,
                 const numerics::QuadOptions& q = {});
double zeta_plus(const Model& m, double x, double x1_hat, const numerics::QuadOptions& q = {});
double tau_plus(const Model& m, double x, double x1_hat, double tau1,
                const numerics::QuadOptions& q = {});

struct SlowCurves {
    double x0 = 0.0;
    double x1_hat = 0.0;
    double tau1 = 0.0;
    std::vector<double> x;
    std::vector<double> zeta_minus;
    std::vector<double> tau_minus;
    std::vector<double> zeta_plus;
    std::vector<double> tau_plus;
};

inline constexpr std::size_t kDefaultCurveGrid = 512;

/// Samples the four slow curves on `n` uniform points of [x0, x1_hat].
/// The minus curves accumulate forward from x0, the plus curves backward
/// from x1_hat, so the two families are computed independently. tau1 is the
/// travel time to the exit point of x0 (solve_exit).
SlowCurves slow_curves(const Model& m, double x0, double x1_hat, std::size_t n = kDefaultCurveGrid,
                       const EntryExitOptions& opts = {});

}  // namespace delaylab
