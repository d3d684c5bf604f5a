#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "delaylab/error.hpp"
#include "delaylab/experiment.hpp"
#include "delaylab/io.hpp"

using namespace delaylab;

namespace {

Model coupled() { return model_from_text("coupled", "1 + z", "x + z", {-1.5, 1.5}); }

double start_of(const Model& m) { return m.name == "quadratic" ? -0.5 : -1.0; }

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

TEST_CASE("linear sweep") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025, 0.0125};
    const SweepReport r = run_sweep(builtin_model("linear"), -1, 0.1, eps);
    REQUIRE(r.records.size() == eps.size());
    std::vector<double> minz, haus, gap;
    for (const auto& rec : r.records) {
        REQUIRE(rec.ok);
        // g and f ignore z: the exit point is the singular one for every eps
        CHECK(std::abs(rec.exit_x - 1.0) <= 1e-8);
        CHECK(std::abs(rec.tau_exit - 2.0) <= 1e-8);
        minz.push_back(std::abs(rec.minz_exponent - 0.5));
        haus.push_back(rec.hausdorff);
        gap.push_back(rec.manifold_gap);
    }
    CHECK(strictly_decreasing(minz));
    CHECK(strictly_decreasing(haus));
    CHECK(strictly_decreasing(gap));
    CHECK(r.records.back().hausdorff < 0.05);
    REQUIRE(r.minz_richardson);
    CHECK(std::abs(*r.minz_richardson - 0.5) <= 1e-2);
    REQUIRE(r.rate("minz_exponent"));
    CHECK(r.rate("minz_exponent")->rate.value() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("min-z exponent converges on every builtin") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
    SweepOptions o;
    o.derivative = o.closeness = false;
    for (const auto& name : builtin_model_names()) {
        const Model m = builtin_model(name);
        const SweepReport r = run_sweep(m, start_of(m), 0.1, eps, o);
        std::vector<double> err;
        for (const auto& rec : r.records) err.push_back(std::abs(rec.minz_exponent - r.reference.zeta0));
        CHECK_MESSAGE(strictly_decreasing(err), name);
        CHECK_MESSAGE(std::abs(*r.minz_richardson - r.reference.zeta0) <= 1e-2, name);
    }
}

TEST_CASE("exit point converges at first order when the coefficients feel z") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025, 0.0125};
    SweepOptions o;
    o.closeness = false;
    const SweepReport r = run_sweep(coupled(), -1, 0.1, eps, o);
    std::vector<double> err, tau_err;
    for (const auto& rec : r.records) {
        REQUIRE(rec.ok);
        err.push_back(std::abs(rec.exit_x - r.reference.x1));
        tau_err.push_back(std::abs(rec.tau_exit - r.reference.tau1));
    }
    CHECK(strictly_decreasing(err));
    CHECK(strictly_decreasing(tau_err));
    for (std::size_t i = 1; i < err.size(); ++i) {
        CHECK(err[i] / err[i - 1] > 0.25);
        CHECK(err[i] / err[i - 1] < 0.8);
    }
}

TEST_CASE("degenerate single-eps sweep") {
    const std::vector<double> eps = {0.1};
    const SweepReport r = run_sweep(builtin_model("linear"), -1, 0.1, eps);
    CHECK(r.records.size() == 1);
    for (const auto& fit : r.rates) CHECK_FALSE(fit.rate);
    CHECK_FALSE(r.minz_richardson);
}

TEST_CASE("sweep argument checks and failure recording") {
    const Model lin = builtin_model("linear");
    CHECK_THROWS_AS(run_sweep(lin, -1, 0.1, std::vector<double>{}), PreconditionError);
    CHECK_THROWS_AS(run_sweep(lin, -1, 0.1, std::vector<double>{0.1, 0.2}), PreconditionError);
    CHECK_THROWS_AS(run_sweep(lin, -1, 0.1, std::vector<double>{0.1, -0.1}), PreconditionError);

    // g = x - z delays the exit past x1 = 1; at eps = 0.2 it overshoots the window edge
    const Model late = model_from_text("late", "1", "x - z", {-1.5, 1.03});
    SweepOptions o;
    o.derivative = o.closeness = false;
    const SweepReport r = run_sweep(late, -1, 0.1, std::vector<double>{0.2, 0.01}, o);
    CHECK_FALSE(r.records[0].ok);
    CHECK(r.records[0].error.find("left the model window") != std::string::npos);
    CHECK(r.records[1].ok);

    CHECK_THROWS_AS(run_sweep(late, -1, 0.1, std::vector<double>{0.4, 0.2}, o), Error);
}

TEST_CASE("parallel sweep is identical to the serial one") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
    SweepOptions serial, parallel;
    parallel.jobs = 4;
    const io::Echo echo = {{"command", "sweep"}};
    const auto a = io::to_json(run_sweep(coupled(), -1, 0.1, eps, serial), echo).dump();
    const auto b = io::to_json(run_sweep(coupled(), -1, 0.1, eps, parallel), echo).dump();
    CHECK(a == b);
}

TEST_CASE("derivative probe") {
    const DerivativeProbe lin = derivative_probe(builtin_model("linear"), -1, 0.1, 0.01, 1e-4);
    CHECK(std::abs(lin.value + 1.0) <= 0.05);

    const Model q = builtin_model("quadratic");
    const EntryExitSolution s = solve_exit(q, -0.5);
    const double closed = (q.g0(-0.5) / q.f0(-0.5)) / (q.g0(s.x1) / q.f0(s.x1));
    const DerivativeProbe pq = derivative_probe(q, -0.5, 0.1, 0.01, 1e-4 * 0.5);
    CHECK(std::abs(pq.value - closed) <= 0.1);

    for (const Model& m : {builtin_model("linear"), coupled()}) {
        const DerivativeProbe h1 = derivative_probe(m, -1, 0.1, 0.01, 1e-4);
        const DerivativeProbe h2 = derivative_probe(m, -1, 0.1, 0.01, 0.5e-4);
        CHECK(std::abs(h1.value - h2.value) < h2.uncertainty);
    }
    CHECK_THROWS_AS(derivative_probe(builtin_model("linear"), -1, 0.1, 0.01, 0.0), PreconditionError);
}

TEST_CASE("derivative stability under halving eps") {
    for (const Model& m : {builtin_model("linear"), builtin_model("quadratic"), coupled()}) {
        const double x0 = start_of(m);
        const double h = 1e-4 * std::abs(x0);
        double previous = derivative_probe(m, x0, 0.1, 0.02, h).value;
        for (double eps : {0.01, 0.005}) {
            const double d = derivative_probe(m, x0, 0.1, eps, h).value;
            CHECK(std::abs(d - previous) < 0.05 * std::abs(previous));
            previous = d;
        }
    }
}

TEST_CASE("manifold closeness") {
    const Model lin = builtin_model("linear");
    // for g = x the trajectory keeps zeta = zeta_-(x) + eps log(1/z0) exactly
    const ClosenessProfile p = manifold_closeness(lin, -1, 0.1, 0.05, 0.1);
    CHECK(std::abs(p.sup - 0.05 * std::log(10.0)) <= 1e-6);
    for (double g : p.gap) CHECK(g <= p.sup);
    CHECK(p.x.front() == doctest::Approx(-0.9));
    CHECK(p.x.back() == doctest::Approx(0.9));

    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {0.05, 0.025, 0.0125}) {
        const double sup = manifold_closeness(lin, -1, 0.1, eps, 0.1).sup;
        CHECK(sup < previous);
        previous = sup;
    }
    CHECK(manifold_closeness(lin, -1, 0.1, 1e-3, 0.1).sup < manifold_closeness(lin, -1, 0.1, 1e-2, 0.1).sup);
    CHECK(manifold_closeness(coupled(), -1, 0.1, 0.025, 0.1).sup <
          manifold_closeness(coupled(), -1, 0.1, 0.05, 0.1).sup);

    CHECK_THROWS_AS(manifold_closeness(lin, -1, 0.1, 0.05, 0.3), PreconditionError);
}

TEST_CASE("rate fit") {
    const std::vector<double> eps = {0.2, 0.1, 0.05}, err = {0.4, 0.1, 0.025};
    CHECK(fit_rate(eps, err).value() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(fit_rate(std::vector<double>{0.1}, std::vector<double>{0.1}));
    CHECK_FALSE(fit_rate(eps, std::vector<double>{0.0, 0.0, 0.1}));
}
