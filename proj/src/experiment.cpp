#include "delaylab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "delaylab/error.hpp"

namespace delaylab {
namespace {

std::vector<Point2> trajectory_xz(const Trajectory& traj, std::size_t n) {
    std::vector<Point2> out;
    out.reserve(n + traj.samples.size());
    for (const Sample& s : resample(traj, n)) out.push_back({s.x, s.z.value_or(0.0)});
    return out;
}

double exit_x(const Model& m, double x0, double z0, double eps, const IntegratorControls& c, double* error) {
    const Trajectory traj = integrate_zeta(m, {x0, z0, eps}, exit_section(z0, eps), c);
    if (!traj.reached_section) throw IntegrationError(IntegrationError::Kind::MaxSteps, "exit section not reached");
    if (error) *error = traj.x_error_estimate + c.rel_tol * std::max(1.0, std::abs(traj.back().x));
    return traj.back().x;
}

// x is increasing along the trajectory wherever f > 0; find where it equals `x`.
double zeta_at_x(const Trajectory& traj, double x) {
    const auto& S = traj.samples;
    std::size_t lo = 0, hi = S.size() - 1;
    if (!(S[lo].x <= x && x <= S[hi].x)) throw PreconditionError("x outside the trajectory's range");
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (S[mid].x <= x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double a = traj.s(lo), b = traj.s(hi);
    for (int it = 0; it < 100 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        const double mid = 0.5 * (a + b);
        if (interpolate(traj, mid).x <= x) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return *interpolate(traj, 0.5 * (a + b)).zeta;
}

double default_section_delta(double x0, double x1) { return 0.25 * delta_bound(x0, x1); }

}  // namespace

Section exit_section(double z0, double eps) {
    return Section::zeta(zeta_from_z(z0, eps), Crossing::Down).with_x_above(0.0);
}

double singular_hausdorff(const Trajectory& traj, const Model& m, const EntryExitSolution& sol, double z0,
                          double rel_change) {
    double previous = -1.0;
    std::size_t n = 256;
    for (int level = 0; level < 10; ++level, n *= 2) {
        const std::vector<Point2> a = trajectory_xz(traj, n);
        const std::vector<Point2> b = build_configuration(m, sol, z0, n).xz_points();
        const double h = hausdorff_distance(a, b);
        if (previous >= 0.0 && std::abs(h - previous) < rel_change * h) return h;
        previous = h;
    }
    return previous;
}

DerivativeProbe derivative_probe(const Model& m, double x0, double z0, double eps, double h,
                                 const IntegratorControls& controls) {
    if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
    if (!(x0 + h < 0.0) || !m.window.strictly_contains(x0 - h)) {
        throw PreconditionError("x0 +- h must stay inside (x_min, 0)");
    }
    double err_plus = 0.0, err_minus = 0.0;
    const double plus = exit_x(m, x0 + h, z0, eps, controls, &err_plus);
    const double minus = exit_x(m, x0 - h, z0, eps, controls, &err_minus);
    return DerivativeProbe{(plus - minus) / (2.0 * h), (err_plus + err_minus) / (2.0 * h)};
}

double closeness_delta_bound(double x0, double x1, double section_delta) {
    return std::min((std::abs(x0) - section_delta) / 4.0, (x1 - section_delta) / 4.0);
}

ClosenessProfile manifold_closeness(const Model& m, double x0, double z0, double eps, double delta,
                                    double section_delta, const IntegratorControls& controls, std::size_t n) {
    const EntryExitSolution sol = solve_exit(m, x0);
    if (section_delta <= 0.0) section_delta = default_section_delta(x0, sol.x1);
    const double bound = closeness_delta_bound(x0, sol.x1, section_delta);
    if (!(delta > 0.0 && delta < bound)) {
        std::ostringstream os;
        os << "closeness delta must satisfy 0 < delta < " << bound;
        throw PreconditionError(os.str());
    }
    if (n < 2) throw PreconditionError("closeness profile needs at least 2 points");

    const Trajectory traj = integrate_zeta(m, {x0, z0, eps}, exit_section(z0, eps), controls);
    ClosenessProfile p;
    const double a = x0 + delta, b = sol.x1 - delta;
    double reference = zeta_minus(m, x0, a);
    double prev_x = a;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 1 == n) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        if (i > 0) reference -= numerics::integrate([&m](double r) { return m.g0(r) / m.f0(r); }, prev_x, x).value;
        prev_x = x;
        const double gap = std::abs(zeta_at_x(traj, x) - reference);
        p.x.push_back(x);
        p.gap.push_back(gap);
        p.sup = std::max(p.sup, gap);
    }
    return p;
}

const RateFit* SweepReport::rate(const std::string& observable) const {
    for (const auto& r : rates)
        if (r.observable == observable) return &r;
    return nullptr;
}

std::optional<double> fit_rate(std::span<const double> eps, std::span<const double> error) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < eps.size() && i < error.size(); ++i) {
        if (!(eps[i] > 0.0 && error[i] > 0.0) || !std::isfinite(error[i])) continue;
        const double lx = std::log(eps[i]), ly = std::log(error[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++k;
    }
    if (k < 2) return std::nullopt;
    const double denom = static_cast<double>(k) * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (static_cast<double>(k) * sxy - sx * sy) / denom;
}

SweepReport run_sweep(const Model& m, double x0, double z0, std::span<const double> eps_list,
                      const SweepOptions& opts) {
    if (eps_list.empty()) throw PreconditionError("eps list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i])) throw PreconditionError("eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw PreconditionError("eps list must be strictly decreasing");
    }
    const HypothesisReport init = validate_initial(m, {x0, z0, eps_list.front()});
    if (!init.passed()) throw PreconditionError("initial data rejected:\n" + init.summary());

    SweepReport report;
    report.model = m.name;
    report.f_text = m.f.text;
    report.g_text = m.g.text;
    report.x0 = x0;
    report.z0 = z0;
    report.reference = solve_exit(m, x0);
    const EntryExitSolution& ref = report.reference;

    const double section_delta = opts.section_delta > 0.0 ? opts.section_delta : default_section_delta(x0, ref.x1);
    if (!(section_delta < delta_bound(x0, ref.x1))) throw PreconditionError("section delta exceeds min(|x0|, x1)/2");
    const double closeness_delta = opts.closeness_delta > 0.0
                                       ? opts.closeness_delta
                                       : std::min(0.1, 0.5 * closeness_delta_bound(x0, ref.x1, section_delta));
    const double fd_step = opts.fd_step > 0.0 ? opts.fd_step : 1e-4 * std::abs(x0);

    report.records.resize(eps_list.size());
    auto run_one = [&](std::size_t i) {
        SweepRecord& r = report.records[i];
        r.eps = eps_list[i];
        const auto start = std::chrono::steady_clock::now();
        try {
            const Trajectory traj = integrate_zeta(m, {x0, z0, r.eps}, exit_section(z0, r.eps), opts.controls);
            if (!traj.reached_section) throw Error("exit section not reached");
            r.minz_exponent = min_z_exponent(traj);
            r.exit_x = traj.back().x;
            r.tau_exit = traj.back().tau;
            r.steps = traj.accepted_steps;
            r.hausdorff = singular_hausdorff(traj, m, ref, z0, opts.hausdorff_rel_change);
            if (opts.derivative) {
                const DerivativeProbe d = derivative_probe(m, x0, z0, r.eps, fd_step, opts.controls);
                r.d_exit_dx0 = d.value;
                r.d_exit_uncertainty = d.uncertainty;
            }
            if (opts.closeness) {
                r.manifold_gap =
                    manifold_closeness(m, x0, z0, r.eps, closeness_delta, section_delta, opts.controls).sup;
            }
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const std::size_t workers = std::clamp<std::size_t>(opts.jobs, 1, eps_list.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < eps_list.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < eps_list.size(); i = next++) run_one(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    if (std::none_of(report.records.begin(), report.records.end(), [](const SweepRecord& r) { return r.ok; })) {
        std::ostringstream os;
        os << "every eps failed:";
        for (const auto& r : report.records) os << "\n  eps = " << r.eps << ": " << r.error;
        throw Error(os.str());
    }

    auto summarize = [&](const std::string& name, auto error_of) {
        RateFit fit;
        fit.observable = name;
        for (const auto& r : report.records) {
            if (!r.ok) continue;
            fit.eps.push_back(r.eps);
            fit.error.push_back(error_of(r));
        }
        fit.rate = fit_rate(fit.eps, fit.error);
        report.rates.push_back(std::move(fit));
    };
    summarize("minz_exponent", [&](const SweepRecord& r) { return std::abs(r.minz_exponent - ref.zeta0); });
    summarize("exit_x", [&](const SweepRecord& r) { return std::abs(r.exit_x - ref.x1); });
    summarize("hausdorff", [](const SweepRecord& r) { return r.hausdorff; });
    summarize("tau_exit", [&](const SweepRecord& r) { return std::abs(r.tau_exit - ref.tau1); });
    if (opts.derivative) summarize("d_exit_dx0", [&](const SweepRecord& r) { return std::abs(r.d_exit_dx0 - ref.dx1_dx0); });
    if (opts.closeness) summarize("manifold_gap", [](const SweepRecord& r) { return r.manifold_gap; });

    // Richardson extrapolation to eps = 0 from the two smallest successful eps
    const SweepRecord* small = nullptr;
    const SweepRecord* smaller = nullptr;
    for (const auto& r : report.records) {
        if (!r.ok) continue;
        small = smaller;
        smaller = &r;
    }
    if (small && smaller) {
        report.minz_richardson = smaller->minz_exponent + (smaller->minz_exponent - small->minz_exponent) *
                                                              smaller->eps / (small->eps - smaller->eps);
    }
    return report;
}

}  // namespace delaylab
