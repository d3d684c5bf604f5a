#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "delaylab/entry_exit.hpp"
#include "delaylab/model.hpp"

namespace delaylab {

using Vec3 = std::array<double, 3>;
using Point2 = std::array<double, 2>;

/// Point of the extended (x, z, zeta, tau) space.
struct ConfigPoint {
    double x = 0.0;
    double z = 0.0;
    double zeta = 0.0;
    double tau = 0.0;
};

/// The singular orbit gamma1 -> gamma0 -> gamma2: a fast fall at x0, the
/// slow passage along z = 0 and a fast rise at x1.
struct SingularConfiguration {
    double x0 = 0.0;
    double x1 = 0.0;
    double z0 = 0.0;
    double tau1 = 0.0;
    std::vector<ConfigPoint> gamma1;  ///< x = x0, z from z0 down to 0
    std::vector<ConfigPoint> gamma0;  ///< z = 0, (x, zeta_-(x;0), tau_-(x;0)) for x in [x0, x1]
    std::vector<ConfigPoint> gamma2;  ///< x = x1, z from 0 up to z0, at tau = tau1

    /// The (x, z) projection of all three pieces, in orbit order.
    std::vector<Point2> xz_points() const;
};

SingularConfiguration build_configuration(const Model& m, const EntryExitSolution& sol, double z0,
                                          std::size_t n = kDefaultCurveGrid);

/// Sampled surface in (x, zeta, tau)-space. Samples are stored row-major:
/// index = i * param2.size() + j for param1[i], param2[j].
struct ManifoldPatch {
    std::string label;
    std::string param2_name;
    std::vector<double> param1;  ///< x
    std::vector<double> param2;  ///< tau0_hat for M_L, x1_hat for M_R
    std::vector<Vec3> points;
    std::vector<Vec3> tangent1;  ///< along the slow flow
    std::vector<Vec3> tangent2;  ///< along the second parameter

    std::size_t index(std::size_t i, std::size_t j) const { return i * param2.size() + j; }
};

struct ManifoldPair {
    ManifoldPatch left;
    ManifoldPatch right;
};

/// Largest admissible section half-width: half of min(|x0|, x1).
double delta_bound(double x0, double x1);

/// M_L over x in [x0, x1], tau0_hat in [-delta, delta] and M_R over
/// x in [x0, x1], x1_hat in [x1 - delta, x1 + delta], with analytic tangents
/// (f, -g, 1), (0, 0, 1) and (f, -g, 1), (0, g(x1_hat), -1). `n_param` is
/// rounded up to an odd count so the centre rows reproduce gamma0. Throws
/// PreconditionError unless 0 < delta < delta_bound(x0, x1) and
/// x1 + delta stays inside the window.
ManifoldPair build_manifolds(const Model& m, double x0, double x1, double delta,
                             std::size_t n = kDefaultCurveGrid, std::size_t n_param = 21);

/// Determinant of the rows (f(x_hat), -g(x_hat), 1), (0, 0, 1), (0, g(x1), -1),
/// i.e. of the combined tangent frames of M_L and M_R at gamma0.
double transversality_det(const Model& m, double x_hat, double x1);

/// Symmetric Hausdorff distance between finite point sets in the plane.
/// Throws PreconditionError if either set is empty.
double hausdorff_distance(std::span<const Point2> a, std::span<const Point2> b);

}  // namespace delaylab
