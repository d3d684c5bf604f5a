#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "delaylab/model.hpp"

namespace delaylab {

/// Coordinates a trajectory is integrated in.
///   XZ:   (x, z) in fast time t,            x' = eps f,  z' = g z
///   Zeta: (x, zeta) in slow time tau = eps t, zeta = eps log(1/z),
///         x' = f(x, e^{-zeta/eps}, eps),  zeta' = -g(x, e^{-zeta/eps}, eps)
enum class Chart { XZ, Zeta };

const char* to_string(Chart c);

/// Exponent beyond which e^{-zeta/eps} is flushed to exactly zero.
inline constexpr double kExpFloor = 745.0;
/// Smallest z the (x, z) chart accepts before reporting underflow.
inline constexpr double kZUnderflow = 1e-300;

/// e^{-zeta/eps}; zero when zeta/eps > kExpFloor.
double z_from_zeta(double zeta, double eps);
/// eps log(1/z); requires z > 0.
double zeta_from_z(double z, double eps);

enum class Crossing { Up, Down, Any };

/// A Poincare section {z = c}, {zeta = c} or {x = c}. Only crossings in the
/// given direction with x > x_above count.
struct Section {
    enum class Kind { Z, Zeta, X };

    Kind kind = Kind::Z;
    double value = 0.0;
    Crossing direction = Crossing::Any;
    double x_above = -std::numeric_limits<double>::infinity();

    static Section z(double c, Crossing d = Crossing::Any) { return {Kind::Z, c, d}; }
    static Section zeta(double c, Crossing d = Crossing::Any) { return {Kind::Zeta, c, d}; }
    static Section x(double c, Crossing d = Crossing::Any) { return {Kind::X, c, d}; }

    Section& with_x_above(double bound) {
        x_above = bound;
        return *this;
    }
};

/// Throws PreconditionError for a non-finite value or a {z = c} with c <= 0.
void validate(const Section& s);

struct IntegratorControls {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    std::size_t max_steps = 10'000'000;
    double initial_step = 0.0;  ///< 0 picks 1e-4 of the characteristic time
    double max_step = 0.0;      ///< 0 picks a step that cannot jump across the window
    /// End of the independent variable (t for XZ, tau for Zeta) if no section is met.
    double s_max = std::numeric_limits<double>::infinity();
};

struct Sample {
    double t = 0.0;    ///< fast time
    double tau = 0.0;  ///< slow time, eps t
    double x = 0.0;
    std::optional<double> z;     ///< empty where e^{-zeta/eps} underflows
    std::optional<double> zeta;  ///< empty in the XZ chart when eps log(1/z) is undefined
};

struct Event {
    std::size_t index = 0;  ///< position of the crossing in Trajectory::samples
    Section section;
};

struct Trajectory {
    Chart chart = Chart::Zeta;
    double eps = 0.0;
    std::vector<Sample> samples;
    /// Chart state (x, z or zeta) and its derivative in the chart's
    /// independent variable at every sample; drives Hermite resampling.
    std::vector<std::array<double, 2>> states;
    std::vector<std::array<double, 2>> rates;
    std::vector<Event> events;
    bool reached_section = false;
    /// Accumulated local error estimate of x plus the event-location slack.
    double x_error_estimate = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;

    const Sample& back() const { return samples.back(); }
    /// Independent variable of sample i: t for XZ, tau for Zeta.
    double s(std::size_t i) const { return chart == Chart::XZ ? samples[i].t : samples[i].tau; }
};

/// Dormand-Prince 5(4) in the (x, z) chart, stopping at the first directed
/// crossing of `stop`. Throws IntegrationError on step-size underflow, on
/// z < kZUnderflow (the Zeta chart is the remedy), on max_steps, or when x
/// leaves the model window before the section is reached.
Trajectory integrate_xz(const Model& m, const InitialData& d, const Section& stop,
                        const IntegratorControls& controls = {});

/// Same integrator in the (x, zeta) chart with slow time; needs eps > 0.
Trajectory integrate_zeta(const Model& m, const InitialData& d, const Section& stop,
                          const IntegratorControls& controls = {});

/// Largest zeta on a Zeta-chart trajectory, i.e. eps log(1/min z), refined by
/// a parabola through the discrete maximum and its neighbours.
double min_z_exponent(const Trajectory& traj);

/// Cubic Hermite state at independent variable s inside the trajectory span.
Sample interpolate(const Trajectory& traj, double s);

/// `n` samples uniformly spaced in the independent variable, endpoints included.
std::vector<Sample> resample(const Trajectory& traj, std::size_t n);

}  // namespace delaylab
