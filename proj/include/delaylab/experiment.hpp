#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaylab/entry_exit.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/integrate.hpp"
#include "delaylab/model.hpp"

namespace delaylab {

/// Exit section {z = z0, x > 0} written in the zeta chart and crossed downward.
Section exit_section(double z0, double eps);

/// Hausdorff distance in the (x, z)-plane between a zeta-chart trajectory
/// and the singular configuration. Both samplings are doubled until the value
/// moves by less than `rel_change` (relative).
double singular_hausdorff(const Trajectory& traj, const Model& m, const EntryExitSolution& sol, double z0,
                          double rel_change = 0.01);

struct DerivativeProbe {
    double value = 0.0;
    /// Integrator tolerance and local error estimates propagated through the
    /// central difference.
    double uncertainty = 0.0;
};

/// Central difference (x1(x0 + h) - x1(x0 - h)) / 2h of the exit point on
/// {z = z0, x > 0} at fixed eps.
DerivativeProbe derivative_probe(const Model& m, double x0, double z0, double eps, double h,
                                 const IntegratorControls& controls = {});

struct ClosenessProfile {
    std::vector<double> x;
    std::vector<double> gap;  ///< |zeta along the trajectory - zeta_-(x; 0)|
    double sup = 0.0;
};

/// Largest admissible delta for the closeness window [x0 + delta, x1 - delta].
double closeness_delta_bound(double x0, double x1, double section_delta);

/// Gap between the eps > 0 trajectory and M_L (at tau0_hat = 0) over
/// x in [x0 + delta, x1 - delta]. `section_delta` <= 0 picks a quarter of
/// delta_bound(x0, x1).
ClosenessProfile manifold_closeness(const Model& m, double x0, double z0, double eps, double delta,
                                    double section_delta = 0.0, const IntegratorControls& controls = {},
                                    std::size_t n = 256);

struct SweepRecord {
    double eps = 0.0;
    bool ok = false;
    std::string error;
    double minz_exponent = 0.0;  ///< max zeta = eps log(1/min z)
    double exit_x = 0.0;         ///< x where the trajectory meets {z = z0, x > 0}
    double hausdorff = 0.0;
    double tau_exit = 0.0;
    double d_exit_dx0 = 0.0;
    double d_exit_uncertainty = 0.0;
    double manifold_gap = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;  ///< not part of the serialized report
};

struct RateFit {
    std::string observable;
    std::vector<double> eps;
    std::vector<double> error;
    std::optional<double> rate;  ///< slope of log error against log eps
};

struct SweepReport {
    std::string model;
    std::string f_text;
    std::string g_text;
    double x0 = 0.0;
    double z0 = 0.0;
    EntryExitSolution reference;
    std::vector<SweepRecord> records;  ///< decreasing eps
    std::vector<RateFit> rates;
    std::optional<double> minz_richardson;  ///< extrapolation of the two smallest eps

    const RateFit* rate(const std::string& observable) const;
};

struct SweepOptions {
    IntegratorControls controls{};
    unsigned jobs = 1;
    double fd_step = 0.0;          ///< 0 picks 1e-4 |x0|
    double section_delta = 0.0;    ///< 0 picks a quarter of delta_bound
    double closeness_delta = 0.0;  ///< 0 picks min(0.1, half of the admissible bound)
    bool derivative = true;
    bool closeness = true;
    double hausdorff_rel_change = 0.01;
};

/// Runs each eps (concurrently up to `jobs`) from (x0, z0) to the exit
/// section. Failures are recorded per record; if every eps fails the sweep
/// throws Error with the collected diagnostics. `eps_list` must be non-empty,
/// positive and strictly decreasing.
SweepReport run_sweep(const Model& m, double x0, double z0, std::span<const double> eps_list,
                      const SweepOptions& opts = {});

/// Least-squares slope of log(error) against log(eps) over positive errors;
/// empty with fewer than two usable points.
std::optional<double> fit_rate(std::span<const double> eps, std::span<const double> error);

}  // namespace delaylab
