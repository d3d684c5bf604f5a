#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "delaylab/error.hpp"
#include "delaylab/numerics.hpp"

using namespace delaylab::numerics;
using delaylab::NumericsError;

TEST_CASE("quadrature examples") {
    CHECK(integrate([](double x) { return x; }, 0, 1).value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate([](double x) { return x; }, -1, 0).value == doctest::Approx(-0.5).epsilon(1e-14));
    const QuadResult e = integrate([](double x) { return std::exp(x); }, 0, 1);
    CHECK(std::abs(e.value - (std::exp(1.0) - 1.0)) <= 1e-12 * e.value);
    CHECK(e.abs_error_estimate <= std::max(1e-14, 1e-12 * e.value));
    CHECK(e.evaluations > 0);
    CHECK(integrate([](double) { return 1.0; }, 2, 2).value == 0.0);
}

TEST_CASE("quadrature of a peaked integrand") {
    const QuadResult r = integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1, 1);
    CHECK(std::abs(r.value - 2.0 * std::atan(1.0 / 1e-2) / 1e-2) <= 1e-10 * r.value);
}

TEST_CASE("quadrature failures") {
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0, 1), NumericsError);
    QuadOptions tight;
    tight.max_intervals = 4;
    CHECK_THROWS_WITH_AS(integrate([](double x) { return std::sqrt(std::abs(x - 0.3)); }, 0, 1, tight),
                         doctest::Contains("subinterval"), NumericsError);
}

TEST_CASE("property: additivity and orientation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.5, 3.0);
    const ScalarFn family[] = {
        [](double x) { return std::exp(x) * std::sin(3 * x); },
        [](double x) { return x + x * x; },
        [](double x) { return 1.0 / (1.0 + x * x); },
        [](double x) { return std::cos(x) / (2.0 + x); },
    };
    for (int trial = 0; trial < 200; ++trial) {
        const auto& h = family[trial % 4];
        const double a = u(rng), b = a + w(rng);
        const double c = std::uniform_real_distribution<double>(a, b)(rng);
        const QuadResult ab = integrate(h, a, b), ac = integrate(h, a, c), cb = integrate(h, c, b);
        const double budget = 10.0 * (ab.abs_error_estimate + ac.abs_error_estimate + cb.abs_error_estimate);
        CHECK(std::abs(ac.value + cb.value - ab.value) <= budget);

        const QuadResult ba = integrate(h, b, a);
        CHECK(ba.value == -ab.value);
        CHECK(ba.abs_error_estimate == ab.abs_error_estimate);
    }
}

TEST_CASE("root examples") {
    CHECK(std::abs(find_root([](double s) { return s * s - 2; }, 1, 2, 1e-12) - std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(find_root([](double s) { return s; }, -1, 1)) <= 1e-12);
    CHECK(find_root([](double s) { return s - 1; }, 1, 3) == 1.0);
    const double q = find_root([](double s) { return s * s / 2 + s * s * s / 3 - 1.0 / 12; }, 0, 0.8);
    CHECK(std::abs(q - (std::sqrt(3.0) - 1.0) / 2.0) <= 1e-12);
}

TEST_CASE("root failures") {
    CHECK_THROWS_WITH_AS(find_root([](double s) { return s * s + 1; }, -1, 1), doctest::Contains("no sign change"),
                         NumericsError);
    RootOptions few;
    few.max_iterations = 2;
    CHECK_THROWS_AS(find_root([](double s) { return std::exp(s) - 2; }, -10, 10, few), NumericsError);
}

TEST_CASE("property: root residual") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(0.5, 3.0), shift(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double k = coef(rng), r = shift(rng), p = coef(rng);
        const ScalarFn F = [=](double s) { return k * (s - r) + p * std::pow(s - r, 3) + 0.1 * std::sin(s - r); };
        const double a = r - coef(rng), b = r + coef(rng);
        const double tol = 1e-12;
        const double root = find_root(F, a, b, tol);
        CHECK(root >= a);
        CHECK(root <= b);
        const double scale = std::max(std::abs(F(a)), std::abs(F(b))) / (b - a);
        CHECK(std::abs(F(root)) <= 2.0 * scale * tol);
    }
}
