#include "delaylab/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delaylab/error.hpp"

namespace delaylab {
namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

State hermite(double theta, double h, const State& y0, const State& y1, const State& f0, const State& f1) {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    State y;
    for (std::size_t i = 0; i < 2; ++i) y[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return y;
}

State hermite_rate(double theta, double h, const State& y0, const State& y1, const State& f0,
                   const State& f1) {
    const double t2 = theta * theta;
    const double d00 = (6 * t2 - 6 * theta) / h;
    const double d10 = 3 * t2 - 4 * theta + 1;
    const double d01 = (-6 * t2 + 6 * theta) / h;
    const double d11 = 3 * t2 - 2 * theta;
    State r;
    for (std::size_t i = 0; i < 2; ++i) r[i] = d00 * y0[i] + d10 * f0[i] + d01 * y1[i] + d11 * f1[i];
    return r;
}

Sample to_sample(Chart chart, double eps, double s, const State& y) {
    Sample out;
    out.x = y[0];
    if (chart == Chart::XZ) {
        out.t = s;
        out.tau = eps * s;
        out.z = y[1];
        if (y[1] > 0.0) out.zeta = zeta_from_z(y[1], eps);
    } else {
        out.tau = s;
        out.t = s / eps;
        out.zeta = y[1];
        if (y[1] / eps <= kExpFloor) out.z = std::exp(-y[1] / eps);
    }
    return out;
}

/// Right-hand side, sample conversion and section function for one chart.
struct ChartOps {
    Chart chart;
    const Model& m;
    double eps;

    State rhs(const State& y) const {
        const double x = y[0];
        if (chart == Chart::XZ) {
            const double z = y[1];
            return {eps * m.f(x, z, eps), m.g(x, z, eps) * z};
        }
        const double z = z_from_zeta(y[1], eps);
        return {m.f(x, z, eps), -m.g(x, z, eps)};
    }

    Sample sample(double s, const State& y) const { return to_sample(chart, eps, s, y); }

    // Signed distance to the section: positive on the side z > c, zeta > c or x > c.
    double section(const Section& sec, const State& y) const {
        switch (sec.kind) {
            case Section::Kind::X:
                return y[0] - sec.value;
            case Section::Kind::Z:
                if (chart == Chart::XZ) return y[1] - sec.value;
                return zeta_from_z(sec.value, eps) - y[1];
            case Section::Kind::Zeta:
                if (chart == Chart::Zeta) return y[1] - sec.value;
                return zeta_from_z(y[1], eps) - sec.value;
        }
        return 0.0;
    }
};

struct StepResult {
    State y{};      ///< fifth-order solution
    State rate{};   ///< right-hand side at y (first stage of the next step)
    State local{};  ///< embedded error estimate
};

StepResult dopri_step(const ChartOps& ops, const State& y, const State& k1, double h) {
    State k2, k3, k4, k5, k6, tmp;
    StepResult out;
    for (std::size_t i = 0; i < 2; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = ops.rhs(tmp);
    for (std::size_t i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = ops.rhs(tmp);
    for (std::size_t i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = ops.rhs(tmp);
    for (std::size_t i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = ops.rhs(tmp);
    for (std::size_t i = 0; i < 2; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = ops.rhs(tmp);
    for (std::size_t i = 0; i < 2; ++i)
        out.y[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    out.rate = ops.rhs(out.y);
    for (std::size_t i = 0; i < 2; ++i)
        out.local[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * out.rate[i]);
    return out;
}

double error_norm(Chart chart, const IntegratorControls& c, const State& y, const StepResult& r) {
    double err = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        if (!std::isfinite(r.y[i]) || !std::isfinite(r.rate[i])) return std::numeric_limits<double>::infinity();
        const double size = std::max(std::abs(y[i]), std::abs(r.y[i]));
        // z evolves multiplicatively, so its error is measured relative to z
        const double scale = (chart == Chart::XZ && i == 1) ? (c.abs_tol + c.rel_tol) * size
                                                             : c.abs_tol + c.rel_tol * size;
        err += (r.local[i] / scale) * (r.local[i] / scale);
    }
    return std::sqrt(err / 2.0);
}

// d/ds of ChartOps::section along the flow
double section_rate(const ChartOps& ops, const Section& sec, const State& y, const State& rate) {
    switch (sec.kind) {
        case Section::Kind::X:
            return rate[0];
        case Section::Kind::Z:
            return ops.chart == Chart::XZ ? rate[1] : -rate[1];
        case Section::Kind::Zeta:
            return ops.chart == Chart::Zeta ? rate[1] : -ops.eps * rate[1] / y[1];
    }
    return 0.0;
}

struct Polished {
    bool ok = false;
    double theta = 0.0;
    State y{};
    State rate{};
    std::size_t evaluations = 0;
};

// Newton refinement of a Hermite-located crossing with genuine partial steps
// from the start of the step, so the event state is an integrator state.
Polished polish_event(const ChartOps& ops, const Section& sec, const State& y0, const State& f0, double h,
                      double theta, double width) {
    Polished p;
    try {
        for (int it = 0; it < 4; ++it) {
            const StepResult r = dopri_step(ops, y0, f0, theta * h);
            p.evaluations += 6;
            const double value = ops.section(sec, r.y);
            const double slope = section_rate(ops, sec, r.y, r.rate) * h;
            if (!std::isfinite(value) || !(std::abs(slope) > 0.0)) return p;
            const double next = theta - value / slope;
            if (!(next > 0.0 && next <= 1.0)) return p;
            p.theta = theta;
            p.y = r.y;
            p.rate = r.rate;
            if (std::abs(next - theta) <= width) {
                p.ok = true;
                return p;
            }
            theta = next;
        }
    } catch (const DomainFault&) {
    }
    return p;
}

bool crossed(Crossing dir, double before, double after) {
    const bool up = before < 0.0 && after >= 0.0;
    const bool down = before > 0.0 && after <= 0.0;
    switch (dir) {
        case Crossing::Up: return up;
        case Crossing::Down: return down;
        case Crossing::Any: return up || down;
    }
    return false;
}

Trajectory run(const ChartOps& ops, const State& y_start, const Section& stop, const IntegratorControls& c) {
    validate(stop);
    if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) throw PreconditionError("tolerances must be positive");

    Trajectory traj;
    traj.chart = ops.chart;
    traj.eps = ops.eps;

    double s = 0.0;
    State y = y_start;
    State f = ops.rhs(y);
    traj.rhs_evaluations = 1;
    auto push = [&](double at, const State& state, const State& rate) {
        traj.samples.push_back(ops.sample(at, state));
        traj.states.push_back(state);
        traj.rates.push_back(rate);
    };
    push(s, y, f);

    const Window& w = ops.m.window;
    double h_max = c.max_step;
    if (h_max <= 0.0) {
        // slow time to cross a twentieth of the window at the initial drift
        const double drift = std::max(std::abs(ops.m.f(y[0], ops.chart == Chart::XZ ? y[1] : 0.0, ops.eps)), 1e-12);
        h_max = (w.x_max - w.x_min) / (20.0 * drift);
        if (ops.chart == Chart::XZ) h_max = ops.eps > 0.0 ? h_max / ops.eps : std::numeric_limits<double>::infinity();
    }
    double h = c.initial_step;
    if (h <= 0.0) {
        double rate = 0.0;
        for (std::size_t i = 0; i < 2; ++i) rate = std::max(rate, std::abs(f[i]) / std::max(std::abs(y[i]), 1e-3));
        h = 1e-4 / std::max(rate, 1e-12);
    }
    h = std::min(h, h_max);

    auto left_window = [&w](double x) {
        throw IntegrationError(IntegrationError::Kind::LeftWindow,
                               "x = " + fmt(x) + " left the model window [" + fmt(w.x_min) + ", " + fmt(w.x_max) +
                                   "] before the section was reached");
    };

    double section_before = ops.section(stop, y);
    std::size_t steps = 0;
    std::string last_fault;

    for (;;) {
        if (steps++ >= c.max_steps) {
            throw IntegrationError(IntegrationError::Kind::MaxSteps,
                                   "exceeded " + std::to_string(c.max_steps) + " steps at s = " + fmt(s));
        }
        if (s >= c.s_max) return traj;
        h = std::min({h, h_max, c.s_max - s});
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(s), 1.0)) {
            throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                                   "step size underflow at s = " + fmt(s) + ", x = " + fmt(y[0]) +
                                       (last_fault.empty() ? "" : " (last fault: " + last_fault + ")") +
                                       (ops.chart == Chart::XZ ? "; integrate in the zeta chart instead" : ""));
        }

        StepResult trial;
        double err = std::numeric_limits<double>::infinity();
        try {
            trial = dopri_step(ops, y, f, h);
            traj.rhs_evaluations += 6;
            err = error_norm(ops.chart, c, y, trial);
        } catch (const DomainFault& e) {
            // a stage overshot into a region where the coefficients fault; retry smaller
            last_fault = e.what();
        }

        if (err > 1.0) {
            ++traj.rejected_steps;
            h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            continue;
        }

        ++traj.accepted_steps;
        const double s_new = s + h;
        traj.x_error_estimate += std::abs(trial.local[0]);
        const State& y_new = trial.y;
        const State& k7 = trial.rate;

        if (ops.chart == Chart::XZ && y_new[1] < kZUnderflow) {
            throw IntegrationError(IntegrationError::Kind::ZUnderflow,
                                   "z fell below " + fmt(kZUnderflow) + " at t = " + fmt(s_new) + ", x = " +
                                       fmt(y_new[0]) + "; integrate in the zeta chart instead");
        }

        const double section_after = ops.section(stop, y_new);
        if (crossed(stop.direction, section_before, section_after)) {
            // bisection on the cubic Hermite interpolant of the step
            double lo = 0.0, hi = 1.0;
            const double width = 1e-12 * std::max(1.0, std::abs(s_new)) / h;
            for (int it = 0; it < 200 && hi - lo > width; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double v = ops.section(stop, hermite(mid, h, y, y_new, f, k7));
                if (crossed(stop.direction, section_before, v)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            State y_event = hermite(hi, h, y, y_new, f, k7);
            State r_event = hermite_rate(hi, h, y, y_new, f, k7);
            double theta = hi;
            if (hi < 1.0) {
                const Polished p = polish_event(ops, stop, y, f, h, hi, width);
                traj.rhs_evaluations += p.evaluations;
                if (p.ok) {
                    theta = p.theta;
                    y_event = p.y;
                    r_event = p.rate;
                }
            }
            if (y_event[0] > stop.x_above) {
                if (!w.contains(y_event[0])) left_window(y_event[0]);
                const double s_event = (theta == 1.0) ? s_new : s + theta * h;
                traj.x_error_estimate += 1e-12 * std::max(1.0, std::abs(s_new)) * std::abs(r_event[0]);
                push(s_event, y_event, r_event);
                traj.events.push_back(Event{traj.samples.size() - 1, stop});
                traj.reached_section = true;
                return traj;
            }
        }

        s = s_new;
        y = y_new;
        f = k7;
        section_before = section_after;
        push(s, y, f);

        if (!w.contains(y[0])) left_window(y[0]);
        h *= std::min(5.0, err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2));
    }
}

void check_initial(const Model& m, const InitialData& d) {
    if (!std::isfinite(d.x0) || !m.window.contains(d.x0)) throw PreconditionError("x0 must lie in the model window");
    if (!(d.z0 > 0.0) || !std::isfinite(d.z0)) throw PreconditionError("z0 must be positive and finite");
    if (!(d.eps >= 0.0) || !std::isfinite(d.eps)) throw PreconditionError("eps must be finite and >= 0");
}

std::size_t segment_of(const Trajectory& traj, double s) {
    std::size_t lo = 0, hi = traj.samples.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (traj.s(mid) <= s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace

const char* to_string(Chart c) { return c == Chart::XZ ? "xz" : "zeta"; }

double z_from_zeta(double zeta, double eps) {
    const double ratio = zeta / eps;
    return ratio > kExpFloor ? 0.0 : std::exp(-ratio);
}

double zeta_from_z(double z, double eps) { return eps == 0.0 ? 0.0 : eps * std::log(1.0 / z); }

void validate(const Section& s) {
    if (!std::isfinite(s.value)) throw PreconditionError("section value must be finite");
    if (s.kind == Section::Kind::Z && !(s.value > 0.0)) throw PreconditionError("section {z = c} needs c > 0");
    if (std::isnan(s.x_above)) throw PreconditionError("section x bound must not be NaN");
}

Trajectory integrate_xz(const Model& m, const InitialData& d, const Section& stop,
                        const IntegratorControls& controls) {
    check_initial(m, d);
    return run(ChartOps{Chart::XZ, m, d.eps}, State{d.x0, d.z0}, stop, controls);
}

Trajectory integrate_zeta(const Model& m, const InitialData& d, const Section& stop,
                          const IntegratorControls& controls) {
    check_initial(m, d);
    if (!(d.eps > 0.0)) throw PreconditionError("the zeta chart needs eps > 0");
    return run(ChartOps{Chart::Zeta, m, d.eps}, State{d.x0, zeta_from_z(d.z0, d.eps)}, stop, controls);
}

double min_z_exponent(const Trajectory& traj) {
    if (traj.chart != Chart::Zeta) throw PreconditionError("min_z_exponent needs a zeta-chart trajectory");
    const std::size_t n = traj.samples.size();
    if (n < 3) throw PreconditionError("trajectory too short: need at least 3 samples");

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (*traj.samples[i].zeta > *traj.samples[best].zeta) best = i;
    }
    const double peak = *traj.samples[best].zeta;
    if (best == 0 || best + 1 == n) return peak;

    // parabola through three adjacent samples, Newton form in tau
    const double t0 = traj.samples[best - 1].tau, t1 = traj.samples[best].tau, t2 = traj.samples[best + 1].tau;
    const double z0 = *traj.samples[best - 1].zeta, z2 = *traj.samples[best + 1].zeta;
    const double d01 = (peak - z0) / (t1 - t0);
    const double d12 = (z2 - peak) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);
    if (!(curv < 0.0)) return peak;
    // p(t) = z0 + d01 (t - t0) + curv (t - t0)(t - t1)
    const double t_star = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
    if (t_star < t0 || t_star > t2) return peak;
    const double value = z0 + d01 * (t_star - t0) + curv * (t_star - t0) * (t_star - t1);
    return std::max(value, peak);
}

Sample interpolate(const Trajectory& traj, double s) {
    if (traj.samples.empty()) throw PreconditionError("empty trajectory");
    const double first = traj.s(0), last = traj.s(traj.samples.size() - 1);
    if (s < first || s > last) throw PreconditionError("interpolation point " + fmt(s) + " outside the trajectory");
    if (traj.samples.size() == 1) return traj.samples[0];
    const std::size_t i = segment_of(traj, s);
    const double s0 = traj.s(i), h = traj.s(i + 1) - s0;
    const double theta = h > 0.0 ? (s - s0) / h : 0.0;
    const State y = hermite(theta, h, traj.states[i], traj.states[i + 1], traj.rates[i], traj.rates[i + 1]);
    return to_sample(traj.chart, traj.eps, s, y);
}

std::vector<Sample> resample(const Trajectory& traj, std::size_t n) {
    if (n < 2) throw PreconditionError("resampling needs at least 2 points");
    if (traj.samples.empty()) throw PreconditionError("empty trajectory");
    const double first = traj.s(0), last = traj.s(traj.samples.size() - 1);
    std::vector<Sample> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = (k + 1 == n) ? last : first + (last - first) * static_cast<double>(k) / static_cast<double>(n - 1);
        out.push_back(interpolate(traj, s));
    }
    return out;
}

}  // namespace delaylab
