#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's numerics.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

/// Plain bisection for `steps` halvings; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int steps = 60) {
    const bool lo_negative = f(lo) < 0.0;
    for (int i = 0; i < steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Exit point of the quadratic model from x0 = -1/2: root of s^2/2 + s^3/3 = 1/12 on [0, 0.8].
inline double quadratic_exit_bisection() {
    return bisect([](double s) { return s * s / 2.0 + s * s * s / 3.0 - 1.0 / 12.0; }, 0.0, 0.8, 60);
}

/// 3x3 determinant by the Leibniz permutation sum.
inline double leibniz_det(const std::array<std::array<double, 3>, 3>& a) {
    constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    constexpr double signs[6] = {1, 1, 1, -1, -1, -1};
    double det = 0.0;
    for (int p = 0; p < 6; ++p) det += signs[p] * a[0][perms[p][0]] * a[1][perms[p][1]] * a[2][perms[p][2]];
    return det;
}

/// Brute-force symmetric Hausdorff distance.
inline double hausdorff(const std::vector<std::array<double, 2>>& a, const std::vector<std::array<double, 2>>& b) {
    auto directed = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& q : to) nearest = std::min(nearest, std::hypot(p[0] - q[0], p[1] - q[1]));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

inline std::vector<std::array<double, 2>> random_points(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::array<double, 2>> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

}  // namespace oracle
