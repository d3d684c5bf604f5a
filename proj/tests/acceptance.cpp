// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "delaylab/entry_exit.hpp"
#include "delaylab/error.hpp"
#include "delaylab/experiment.hpp"
#include "delaylab/expr.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/numerics.hpp"
#include "oracles.hpp"

using namespace delaylab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    o.detail.precision(6);
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s (%.2f s):%s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.str().c_str());
    std::fflush(stdout);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

std::string list(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(4);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

double exit_point(const Model& m, double x0, double z0, double eps) {
    return integrate_zeta(m, {x0, z0, eps}, exit_section(z0, eps)).back().x;
}

int cli_status(const std::string& args) {
    const std::string cmd = std::string(DELAYLAB_CLI) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

const std::vector<double> kDyadic = {0.2, 0.1, 0.05, 0.025};

}  // namespace

int main() {
    const Model lin = builtin_model("linear");

    criterion(1, "entry-exit exactness, linear", [&](Outcome& o) {
        const auto s = solve_exit(lin, -1.0);
        o.detail.precision(17);
        o.detail << " x1=" << s.x1 << " zeta0=" << s.zeta0 << " tau1=" << s.tau1;
        o.require(std::abs(s.x1 - 1.0) <= 1e-8, "x1");
        o.require(std::abs(s.zeta0 - 0.5) <= 1e-10, "zeta0");
        o.require(std::abs(s.tau1 - 2.0) <= 1e-10, "tau1");
    });

    criterion(2, "entry-exit, quadratic vs bisection oracle", [&](Outcome& o) {
        const auto s = solve_exit(builtin_model("quadratic"), -0.5);
        const double ref = oracle::quadratic_exit_bisection();
        o.detail.precision(17);
        o.detail << " x1=" << s.x1 << " oracle=" << ref << " zeta0=" << s.zeta0;
        o.require(std::abs(s.x1 - ref) <= 1e-8, "x1");
        o.require(std::abs(s.zeta0 - 1.0 / 12.0) <= 1e-10, "zeta0");
    });

    criterion(3, "min-z exponent convergence", [&](Outcome& o) {
        const auto start = std::chrono::steady_clock::now();
        SweepOptions opts;
        opts.derivative = opts.closeness = false;
        const SweepReport r = run_sweep(lin, -1, 0.1, kDyadic, opts);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::vector<double> err;
        for (const auto& rec : r.records) err.push_back(rec.ok ? std::abs(rec.minz_exponent - 0.5) : NAN);
        o.detail << " |maxzeta-0.5|=" << list(err) << " richardson=" << r.minz_richardson.value_or(NAN);
        o.require(strictly_decreasing(err), "strictly decreasing");
        o.require(r.minz_richardson && std::abs(*r.minz_richardson - 0.5) <= 1e-2, "richardson within 1e-2");
        o.require(secs < 10.0, "runtime < 10 s");
    });

    criterion(4, "point-set convergence (Hausdorff)", [&](Outcome& o) {
        SweepOptions opts;
        opts.derivative = opts.closeness = false;
        const SweepReport r = run_sweep(lin, -1, 0.1, kDyadic, opts);
        std::vector<double> h;
        for (const auto& rec : r.records) h.push_back(rec.ok ? rec.hausdorff : NAN);
        o.detail << " hausdorff=" << list(h);
        o.require(strictly_decreasing(h), "strictly decreasing");
        o.require(h.back() < 0.05, "< 0.05 at eps=0.025");
    });

    criterion(5, "exit-point convergence and smoothness", [&](Outcome& o) {
        std::vector<double> err;
        for (double eps : kDyadic) err.push_back(std::abs(exit_point(lin, -1, 0.1, eps) - 1.0));
        std::vector<double> ratio;
        for (std::size_t i = 1; i < err.size(); ++i) ratio.push_back(err[i] / err[i - 1]);
        o.detail << " |x1eps-1|=" << list(err) << " ratios=" << list(ratio);
        if (*std::max_element(err.begin(), err.end()) < 1e-10) o.detail << " (errors at roundoff level)";
        o.require(strictly_decreasing(err), "exit error decreasing");
        bool in_band = true;
        for (double q : ratio) in_band = in_band && q > 0.25 && q < 0.8;
        o.require(in_band, "ratios in (0.25, 0.8)");

        const double d = derivative_probe(lin, -1, 0.1, 0.01, 1e-4).value;
        const double d_half_h = derivative_probe(lin, -1, 0.1, 0.01, 0.5e-4).value;
        const double d_half_eps = derivative_probe(lin, -1, 0.1, 0.005, 1e-4).value;
        o.detail.precision(10);
        o.detail << " probe=" << d << " (h/2: " << d_half_h << ", eps/2: " << d_half_eps << ")";
        o.require(std::abs(d + 1.0) <= 0.05, "probe within 0.05 of -1");
        o.require(std::abs(d_half_h - d) < 0.05 * std::abs(d), "stable under h/2");
        o.require(std::abs(d_half_eps - d) < 0.05 * std::abs(d), "stable under eps/2");
    });

    criterion(6, "underflow robustness at eps=1e-4", [&](Outcome& o) {
        const double eps = 1e-4;
        const Trajectory t = integrate_zeta(lin, {-1, 0.1, eps}, exit_section(0.1, eps));
        const double mz = min_z_exponent(t);
        o.detail.precision(8);
        o.detail << " max zeta=" << mz << " steps=" << t.accepted_steps;
        o.require(t.reached_section, "zeta chart reaches the section");
        o.require(mz > 0.49 && mz < 0.51, "max zeta in (0.49, 0.51)");
        bool underflow = false;
        try {
            integrate_xz(lin, {-1, 0.1, eps}, Section::z(0.1, Crossing::Up).with_x_above(0.0));
            o.detail << "; (x,z) chart returned an answer";
        } catch (const IntegrationError& e) {
            underflow = e.kind() == IntegrationError::Kind::ZUnderflow;
            o.detail << "; (x,z) chart: " << e.what();
        }
        o.require(underflow, "(x,z) chart reports underflow");
    });

    criterion(7, "transversality", [&](Outcome& o) {
        std::mt19937_64 rng(2024);
        double worst = 0.0, largest = -INFINITY;
        for (const auto& name : builtin_model_names()) {
            const Model m = builtin_model(name);
            const double x0 = name == "quadratic" ? -0.5 : -1.0;
            const double x1 = solve_exit(m, x0).x1;
            std::uniform_real_distribution<double> pick(x0, x1);
            for (int i = 0; i < 20; ++i) {
                const double xh = pick(rng);
                const double det = transversality_det(m, xh, x1);
                const std::array<std::array<double, 3>, 3> rows = {
                    {{m.f0(xh), -m.g0(xh), 1.0}, {0.0, 0.0, 1.0}, {0.0, m.g0(x1), -1.0}}};
                worst = std::max({worst, std::abs(det + m.f0(xh) * m.g0(x1)),
                                  std::abs(det - oracle::leibniz_det(rows))});
                largest = std::max(largest, det);
            }
        }
        o.detail << " max deviation=" << worst << " largest det=" << largest;
        o.require(worst <= 1e-12, "matches -f g(x1)");
        o.require(largest < 0.0, "strictly negative");
    });

    criterion(8, "manifold closeness, delta=0.1", [&](Outcome& o) {
        std::vector<double> sup;
        for (double eps : kDyadic) sup.push_back(manifold_closeness(lin, -1, 0.1, eps, 0.1).sup);
        o.detail << " sup gap=" << list(sup);
        o.require(strictly_decreasing(sup), "strictly decreasing");
    });

    criterion(9, "chart equivalence", [&](Outcome& o) {
        double worst = 0.0;
        for (const auto& name : builtin_model_names()) {
            const Model m = builtin_model(name);
            const double x0 = name == "quadratic" ? -0.5 : -1.0;
            for (double eps : {0.2, 0.1}) {
                const double a = exit_point(m, x0, 0.1, eps);
                const double b =
                    integrate_xz(m, {x0, 0.1, eps}, Section::z(0.1, Crossing::Up).with_x_above(0.0)).back().x;
                worst = std::max(worst, std::abs(a - b));
            }
        }
        o.detail << " max |zeta chart - xz chart|=" << worst;
        o.require(worst <= 1e-6, "agreement within 1e-6");
    });

    criterion(10, "kernel suites and CLI exit codes", [&](Outcome& o) {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-2, 2), w(0.5, 3);
        const numerics::ScalarFn h = [](double x) { return std::exp(x) * std::sin(3 * x) + 1.0 / (1 + x * x); };
        bool additive = true, oriented = true, residual = true;
        for (int i = 0; i < 100; ++i) {
            const double a = u(rng), b = a + w(rng), c = std::uniform_real_distribution<double>(a, b)(rng);
            const auto ab = numerics::integrate(h, a, b), ac = numerics::integrate(h, a, c),
                       cb = numerics::integrate(h, c, b);
            additive = additive && std::abs(ac.value + cb.value - ab.value) <=
                                       10 * (ab.abs_error_estimate + ac.abs_error_estimate + cb.abs_error_estimate);
            oriented = oriented && numerics::integrate(h, b, a).value == -ab.value;

            const double r = u(rng) / 2, k = w(rng);
            const numerics::ScalarFn F = [=](double s) { return k * (s - r) + std::pow(s - r, 3); };
            const double lo = r - w(rng), hi = r + w(rng);
            const double root = numerics::find_root(F, lo, hi, 1e-12);
            residual = residual && std::abs(F(root)) <= 2 * std::max(std::abs(F(lo)), std::abs(F(hi))) / (hi - lo) * 1e-12;
        }
        bool round_trip = true;
        for (const auto& name : builtin_model_names()) {
            const Model m = builtin_model(name);
            const auto fe = expr::parse(m.f.text), ge = expr::parse(m.g.text);
            for (int i = 0; i < 100; ++i) {
                const double x = m.window.x_min + (m.window.x_max - m.window.x_min) * i / 99.0;
                round_trip = round_trip &&
                             std::abs(fe(x, 0, 0) - m.f0(x)) <= 1e-15 * std::max(1.0, std::abs(m.f0(x))) &&
                             std::abs(ge(x, 0, 0) - m.g0(x)) <= 1e-15 * std::max(1.0, std::abs(m.g0(x)));
            }
        }
        o.require(additive, "quadrature additivity");
        o.require(oriented, "quadrature orientation");
        o.require(residual, "root residual");
        o.require(round_trip, "parser round-trip");

        const std::string out = "--out /tmp/delaylab_acceptance";
        const std::pair<std::string, int> cases[] = {
            {"exit --model linear --x0 -1 " + out, 0},
            {"exit --model linear --x0 0.5 " + out, 1},
            {"exit --f 1 --g x --window -1 0.5 --x0 -0.9 " + out, 2},
            {"exit --model nosuch --x0 -1 " + out, 1},
            {"exit --f \"1 +\" --g x --window -1 1 --x0 -0.5 " + out, 1},
            {"sweep --model linear --x0 -1 --z0 0.1 --eps \"\" " + out, 64},
            {"exit --model linear " + out, 64},
            {"exit --bogus-flag " + out, 64},
            {"frobnicate", 64},
            {"geometry --model linear --x0 -1 --delta 0.9 " + out, 1},
        };
        int wrong = 0;
        for (const auto& [args, expected] : cases) {
            const int got = cli_status(args);
            if (got != expected) {
                ++wrong;
                o.detail << " {" << args << ": got " << got << ", want " << expected << "}";
            }
        }
        o.detail << " cli cases=" << std::size(cases) << " wrong=" << wrong;
        o.require(wrong == 0, "CLI exit codes");
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
