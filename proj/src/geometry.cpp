#include "delaylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "delaylab/error.hpp"
#include "delaylab/numerics.hpp"

namespace delaylab {
namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (i + 1 == n) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

// Points of `to` bucketed on a uniform grid of roughly one point per cell.
class PointGrid {
public:
    explicit PointGrid(std::span<const Point2> pts) : pts_(pts) {
        lo_ = hi_ = pts[0];
        for (const auto& p : pts) {
            for (int k = 0; k < 2; ++k) {
                lo_[k] = std::min(lo_[k], p[k]);
                hi_[k] = std::max(hi_[k], p[k]);
            }
        }
        const double span = std::max(hi_[0] - lo_[0], hi_[1] - lo_[1]);
        cell_ = span > 0.0 ? span / std::sqrt(static_cast<double>(pts.size())) : 1.0;
        for (int k = 0; k < 2; ++k) dims_[k] = static_cast<long>((hi_[k] - lo_[k]) / cell_) + 1;

        // counting sort into compressed rows
        start_.assign(static_cast<std::size_t>(dims_[0] * dims_[1]) + 1, 0);
        for (const auto& p : pts) ++start_[flat(coord(p, 0), coord(p, 1)) + 1];
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        order_.resize(pts.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i) order_[fill[flat(coord(pts[i], 0), coord(pts[i], 1))]++] = i;
    }

    // Distance from p to its nearest point, or some value <= `enough` once
    // one is found that close.
    double nearest(const Point2& p, double enough) const {
        const long cx = coord(p, 0), cy = coord(p, 1);
        const long reach = std::max(dims_[0], dims_[1]);
        double best = std::numeric_limits<double>::infinity();
        for (long r = 0; r <= reach; ++r) {
            for (long ix = cx - r; ix <= cx + r; ++ix) {
                if (ix < 0 || ix >= dims_[0]) continue;
                const bool edge = (ix == cx - r || ix == cx + r);
                for (long iy = cy - r; iy <= cy + r; iy += (edge || r == 0) ? 1 : 2 * r) {
                    if (iy < 0 || iy >= dims_[1]) continue;
                    const std::size_t c = flat(ix, iy);
                    for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
                        const Point2& q = pts_[order_[k]];
                        best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
                    }
                }
            }
            if (best <= enough) return best;
            // anything in ring r + 1 or beyond is at least r cells away
            if (best <= static_cast<double>(r) * cell_) return best;
        }
        return best;
    }

private:
    long coord(const Point2& p, int k) const {
        const long c = static_cast<long>(std::floor((p[k] - lo_[k]) / cell_));
        return std::clamp(c, 0L, dims_[k] - 1);
    }
    std::size_t flat(long ix, long iy) const { return static_cast<std::size_t>(ix * dims_[1] + iy); }

    std::span<const Point2> pts_;
    Point2 lo_{}, hi_{};
    double cell_ = 1.0;
    long dims_[2] = {1, 1};
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

double directed_hausdorff(std::span<const Point2> from, std::span<const Point2> to) {
    const PointGrid grid(to);
    double worst = 0.0;
    for (const auto& p : from) worst = std::max(worst, grid.nearest(p, worst));
    return worst;
}

}  // namespace

std::vector<Point2> SingularConfiguration::xz_points() const {
    std::vector<Point2> out;
    out.reserve(gamma1.size() + gamma0.size() + gamma2.size());
    for (const auto* piece : {&gamma1, &gamma0, &gamma2})
        for (const auto& p : *piece) out.push_back({p.x, p.z});
    return out;
}

SingularConfiguration build_configuration(const Model& m, const EntryExitSolution& sol, double z0,
                                          std::size_t n) {
    if (n < 2) throw PreconditionError("configuration needs at least 2 samples per piece");
    if (!(z0 > 0.0)) throw PreconditionError("z0 must be positive");

    SingularConfiguration c;
    c.x0 = sol.x0;
    c.x1 = sol.x1;
    c.z0 = z0;
    c.tau1 = sol.tau1;

    const SlowCurves curves = slow_curves(m, sol.x0, sol.x1, n);
    for (double z : linspace(z0, 0.0, n)) c.gamma1.push_back({sol.x0, z, 0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        c.gamma0.push_back({curves.x[i], 0.0, curves.zeta_minus[i], curves.tau_minus[i]});
    }
    for (double z : linspace(0.0, z0, n)) c.gamma2.push_back({sol.x1, z, 0.0, sol.tau1});
    return c;
}

double delta_bound(double x0, double x1) { return 0.5 * std::min(std::abs(x0), x1); }

ManifoldPair build_manifolds(const Model& m, double x0, double x1, double delta, std::size_t n,
                             std::size_t n_param) {
    if (!(x0 < 0.0 && 0.0 < x1)) throw PreconditionError("manifolds need x0 < 0 < x1");
    if (!(delta > 0.0 && delta < delta_bound(x0, x1))) {
        std::ostringstream os;
        os.precision(17);
        os << "delta = " << delta << " must satisfy 0 < delta < min(|x0|, x1)/2 = " << delta_bound(x0, x1);
        throw PreconditionError(os.str());
    }
    if (!m.window.strictly_contains(x0) || !m.window.strictly_contains(x1 + delta)) {
        throw PreconditionError("x0 and x1 + delta must lie strictly inside the model window");
    }
    if (n < 2) throw PreconditionError("manifolds need at least 2 x samples");
    if (n_param < 3) n_param = 3;
    if (n_param % 2 == 0) ++n_param;

    const numerics::QuadOptions quad{};
    auto ratio = [&m](double r) { return m.g0(r) / m.f0(r); };
    auto inverse_drift = [&m](double r) { return 1.0 / m.f0(r); };
    const double tau1 = numerics::integrate(inverse_drift, x0, x1, quad).value;

    const std::vector<double> xs = linspace(x0, x1, n);
    const std::size_t centre = n_param / 2;

    ManifoldPair out;
    ManifoldPatch& left = out.left;
    left.label = "M_L";
    left.param2_name = "tau0_hat";
    left.param1 = xs;
    left.param2 = linspace(-delta, delta, n_param);
    left.param2[centre] = 0.0;

    ManifoldPatch& right = out.right;
    right.label = "M_R";
    right.param2_name = "x1_hat";
    right.param1 = xs;
    right.param2 = linspace(x1 - delta, x1 + delta, n_param);
    right.param2[centre] = x1;

    // forward accumulation from x0 for M_L, backward from x1 for M_R
    std::vector<double> zeta_fwd(n, 0.0), tau_fwd(n, 0.0), zeta_bwd(n, 0.0), tau_bwd(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        zeta_fwd[i] = zeta_fwd[i - 1] - numerics::integrate(ratio, xs[i - 1], xs[i], quad).value;
        tau_fwd[i] = tau_fwd[i - 1] + numerics::integrate(inverse_drift, xs[i - 1], xs[i], quad).value;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        zeta_bwd[i] = zeta_bwd[i + 1] + numerics::integrate(ratio, xs[i], xs[i + 1], quad).value;
        tau_bwd[i] = tau_bwd[i + 1] + numerics::integrate(inverse_drift, xs[i], xs[i + 1], quad).value;
    }
    std::vector<double> zeta_ext(n_param), tau_ext(n_param);
    for (std::size_t j = 0; j < n_param; ++j) {
        zeta_ext[j] = numerics::integrate(ratio, x1, right.param2[j], quad).value;
        tau_ext[j] = numerics::integrate(inverse_drift, x1, right.param2[j], quad).value;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double x = xs[i];
        const Vec3 flow{m.f0(x), -m.g0(x), 1.0};
        for (std::size_t j = 0; j < n_param; ++j) {
            left.points.push_back({x, zeta_fwd[i], left.param2[j] + tau_fwd[i]});
            left.tangent1.push_back(flow);
            left.tangent2.push_back({0.0, 0.0, 1.0});

            const double x1_hat = right.param2[j];
            right.points.push_back({x, zeta_bwd[i] + zeta_ext[j], tau1 - (tau_bwd[i] + tau_ext[j])});
            right.tangent1.push_back(flow);
            right.tangent2.push_back({0.0, m.g0(x1_hat), -1.0});
        }
    }
    return out;
}

double transversality_det(const Model& m, double x_hat, double x1) {
    const std::array<Vec3, 3> rows{{
        {m.f0(x_hat), -m.g0(x_hat), 1.0},
        {0.0, 0.0, 1.0},
        {0.0, m.g0(x1), -1.0},
    }};
    // cofactor expansion along the first row
    return rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1]) -
           rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0]) +
           rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
}

double hausdorff_distance(std::span<const Point2> a, std::span<const Point2> b) {
    if (a.empty() || b.empty()) throw PreconditionError("Hausdorff distance of an empty point set");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace delaylab
