#include "delaylab/entry_exit.hpp"

#include <cmath>
#include <sstream>

#include "delaylab/error.hpp"

namespace delaylab {
namespace {

numerics::ScalarFn ratio(const Model& m) {
    return [&m](double r) { return m.g0(r) / m.f0(r); };
}

numerics::ScalarFn inverse_drift(const Model& m) {
    return [&m](double r) { return 1.0 / m.f0(r); };
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

EntryExitSolution solve_exit(const Model& m, double x0, const EntryExitOptions& opts) {
    if (!(m.window.x_min < x0 && x0 < 0.0)) {
        throw PreconditionError("x0 = " + fmt(x0) + " must lie in (x_min, 0) = (" + fmt(m.window.x_min) +
                                ", 0)");
    }
    if (opts.hypothesis_grid > 0) {
        const HypothesisReport report = check_hypotheses(m, opts.hypothesis_grid);
        if (!report.passed()) {
            throw PreconditionError("model '" + m.name + "' violates its hypotheses:\n" + report.summary());
        }
    }

    const auto h = ratio(m);
    const double zeta0 = -numerics::integrate(h, x0, 0.0, opts.quad).value;
    // F(s) = int_{x0}^{s} g/f = -zeta0 + int_0^s g/f, increasing on (0, x_max]
    auto F = [&](double s) { return -zeta0 + numerics::integrate(h, 0.0, s, opts.quad).value; };

    const double x_max = m.window.x_max;
    const double at_edge = F(x_max);
    if (at_edge < 0.0) {
        throw NoExitInWindow("entry-exit integral from x0 = " + fmt(x0) + " is still " + fmt(at_edge) +
                             " at x_max = " + fmt(x_max) + "; the delay exceeds the model window");
    }

    // geometric expansion from the turning point to the first sign change
    double lo = 0.0;
    double step = x_max * std::ldexp(1.0, -20);
    double hi = step;
    while (hi < x_max && F(hi) < 0.0) {
        lo = hi;
        step *= 2.0;
        hi = std::min(hi + step, x_max);
    }

    EntryExitSolution sol;
    sol.x0 = x0;
    sol.x1 = numerics::find_root(F, lo, hi, numerics::RootOptions{opts.root_tol, 200});
    sol.zeta0 = zeta0;
    sol.residual = numerics::integrate(h, x0, sol.x1, opts.quad).value;
    sol.tau1 = numerics::integrate(inverse_drift(m), x0, sol.x1, opts.quad).value;
    sol.dx1_dx0 = h(x0) / h(sol.x1);

    if (!(m.g0(sol.x1) > 0.0)) {
        throw PreconditionError("exit point " + fmt(sol.x1) + " does not lie where g(x,0,0) > 0");
    }
    return sol;
}

double zeta_minus(const Model& m, double x0, double x, const numerics::QuadOptions& q) {
    return -numerics::integrate(ratio(m), x0, x, q).value;
}

double tau_minus(const Model& m, double x0, double x, double tau0_hat, const numerics::QuadOptions& q) {
    return tau0_hat + numerics::integrate(inverse_drift(m), x0, x, q).value;
}

double zeta_plus(const Model& m, double x, double x1_hat, const numerics::QuadOptions& q) {
    return numerics::integrate(ratio(m), x, x1_hat, q).value;
}

double tau_plus(const Model& m, double x, double x1_hat, double tau1, const numerics::QuadOptions& q) {
    return tau1 - numerics::integrate(inverse_drift(m), x, x1_hat, q).value;
}

SlowCurves slow_curves(const Model& m, double x0, double x1_hat, std::size_t n,
                       const EntryExitOptions& opts) {
    if (n < 2) throw PreconditionError("slow curves need at least 2 grid points");
    if (!(x0 < 0.0 && 0.0 < x1_hat)) throw PreconditionError("slow curves need x0 < 0 < x1_hat");
    if (!m.window.contains(x0) || !m.window.contains(x1_hat)) {
        throw PreconditionError("slow curves need x0 and x1_hat inside the model window");
    }

    SlowCurves c;
    c.x0 = x0;
    c.x1_hat = x1_hat;
    c.tau1 = solve_exit(m, x0, opts).tau1;
    c.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.x[i] = (i + 1 == n) ? x1_hat : x0 + (x1_hat - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    c.zeta_minus.assign(n, 0.0);
    c.tau_minus.assign(n, 0.0);
    c.zeta_plus.assign(n, 0.0);
    c.tau_plus.assign(n, c.tau1);

    const auto h = ratio(m);
    const auto w = inverse_drift(m);
    for (std::size_t i = 1; i < n; ++i) {
        c.zeta_minus[i] = c.zeta_minus[i - 1] - numerics::integrate(h, c.x[i - 1], c.x[i], opts.quad).value;
        c.tau_minus[i] = c.tau_minus[i - 1] + numerics::integrate(w, c.x[i - 1], c.x[i], opts.quad).value;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        c.zeta_plus[i] = c.zeta_plus[i + 1] + numerics::integrate(h, c.x[i], c.x[i + 1], opts.quad).value;
        c.tau_plus[i] = c.tau_plus[i + 1] - numerics::integrate(w, c.x[i], c.x[i + 1], opts.quad).value;
    }
    return c;
}

}  // namespace delaylab
