#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace delaylab {

/// A scalar coefficient h(x, z, eps) together with the text that defines it.
struct Coefficient {
    std::string text;
    std::function<double(double x, double z, double eps)> fn;

    double operator()(double x, double z, double eps) const { return fn(x, z, eps); }
};

/// Parses `text` with the expression grammar; throws ParseError.
Coefficient coefficient_from_text(const std::string& text);

struct Window {
    double x_min = -1.0;
    double x_max = 1.0;

    bool contains(double x) const { return x_min <= x && x <= x_max; }
    bool strictly_contains(double x) const { return x_min < x && x < x_max; }
};

/// Planar slow-fast system  x' = eps f(x, z, eps),  z' = g(x, z, eps) z.
///
/// The sign conditions f(x,0,0) > 0 and sign g(x,0,0) = sign x are asserted
/// only on `window`; `z_cap` bounds the initial heights the model is meant for.
struct Model {
    std::string name;
    Coefficient f;
    Coefficient g;
    Window window;
    double z_cap = 1.0;

    /// Slow drift and fast rate on the critical set z = 0 at eps = 0.
    double f0(double x) const { return f(x, 0.0, 0.0); }
    double g0(double x) const { return g(x, 0.0, 0.0); }
};

/// Throws PreconditionError unless x_min < 0 < x_max and z_cap > 0.
Model make_model(std::string name, Coefficient f, Coefficient g, Window window, double z_cap = 1.0);

/// Model built from expression texts; throws ParseError or PreconditionError.
Model model_from_text(std::string name, const std::string& f_text, const std::string& g_text,
                      Window window, double z_cap = 1.0);

/// Builtins: "linear" (f=1, g=x), "scaled" (f=2, g=x), "quadratic" (f=1, g=x+x^2).
/// Unknown names throw UnknownModel listing the alternatives.
Model builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

struct InitialData {
    double x0 = -1.0;
    double z0 = 0.1;
    double eps = 0.0;
};

struct HypothesisCheck {
    std::string name;
    bool passed = true;
    std::optional<double> first_violation;  // x (or z for the initial-data check)
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    std::string summary() const;
};

inline constexpr std::size_t kDefaultHypothesisGrid = 1024;
inline constexpr double kTurningPointExclusion = 1e-9;

/// Samples f(.,0,0) and g(.,0,0) on `grid_n` uniform points of the window.
/// Points within kTurningPointExclusion of x = 0 are skipped for the g checks.
HypothesisReport check_hypotheses(const Model& m, std::size_t grid_n = kDefaultHypothesisGrid);

/// Passes iff g(x0, z, 0) < 0 at `grid_n` uniform points of [0, z0].
/// Precondition: x0 < 0 inside the window, 0 < z0 <= z_cap, eps >= 0.
HypothesisReport validate_initial(const Model& m, const InitialData& d,
                                  std::size_t grid_n = kDefaultHypothesisGrid);

}  // namespace delaylab
