#include "delaylab/model.hpp"

#include <cmath>
#include <sstream>

#include "delaylab/error.hpp"
#include "delaylab/expr.hpp"

namespace delaylab {

Coefficient coefficient_from_text(const std::string& text) {
    expr::Expr e = expr::parse(text);
    return Coefficient{text, [e](double x, double z, double eps) { return e(x, z, eps); }};
}

Model make_model(std::string name, Coefficient f, Coefficient g, Window window, double z_cap) {
    if (!(window.x_min < 0.0 && 0.0 < window.x_max)) {
        throw PreconditionError("model window must satisfy x_min < 0 < x_max");
    }
    if (!(z_cap > 0.0) || !std::isfinite(z_cap)) {
        throw PreconditionError("model z_cap must be a positive finite number");
    }
    return Model{std::move(name), std::move(f), std::move(g), window, z_cap};
}

Model model_from_text(std::string name, const std::string& f_text, const std::string& g_text,
                      Window window, double z_cap) {
    return make_model(std::move(name), coefficient_from_text(f_text), coefficient_from_text(g_text),
                      window, z_cap);
}

Model builtin_model(const std::string& name) {
    if (name == "linear") {
        return make_model(name, {"1", [](double, double, double) { return 1.0; }},
                          {"x", [](double x, double, double) { return x; }}, {-1.5, 1.5});
    }
    if (name == "scaled") {
        return make_model(name, {"2", [](double, double, double) { return 2.0; }},
                          {"x", [](double x, double, double) { return x; }}, {-1.5, 1.5});
    }
    if (name == "quadratic") {
        return make_model(name, {"1", [](double, double, double) { return 1.0; }},
                          {"x + x^2", [](double x, double, double) { return x + x * x; }},
                          {-0.8, 0.8});
    }
    std::string known;
    for (const auto& n : builtin_model_names()) known += (known.empty() ? "" : ", ") + n;
    throw UnknownModel("unknown model '" + name + "' (builtin models: " + known + ")");
}

std::vector<std::string> builtin_model_names() { return {"linear", "scaled", "quadratic"}; }

std::string HypothesisReport::summary() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (c.first_violation) os << " (first violation at " << *c.first_violation << ")";
        os << '\n';
    }
    return os.str();
}

namespace {

double grid_point(double a, double b, std::size_t i, std::size_t n) {
    if (i + 1 == n) return b;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void record(HypothesisCheck& c, bool ok, double at) {
    if (ok || !c.passed) return;
    c.passed = false;
    c.first_violation = at;
}

}  // namespace

HypothesisReport check_hypotheses(const Model& m, std::size_t grid_n) {
    if (grid_n < 16) throw PreconditionError("hypothesis grid needs at least 16 points");

    HypothesisCheck f_pos{"f(x,0,0) > 0 on window", true, std::nullopt};
    HypothesisCheck g_left{"g(x,0,0) < 0 for x < 0", true, std::nullopt};
    HypothesisCheck g_right{"g(x,0,0) > 0 for x > 0", true, std::nullopt};

    for (std::size_t i = 0; i < grid_n; ++i) {
        const double x = grid_point(m.window.x_min, m.window.x_max, i, grid_n);
        record(f_pos, m.f0(x) > 0.0, x);
        if (std::abs(x) <= kTurningPointExclusion) continue;
        const double g = m.g0(x);
        if (x < 0.0) {
            record(g_left, g < 0.0, x);
        } else {
            record(g_right, g > 0.0, x);
        }
    }
    return HypothesisReport{{f_pos, g_left, g_right}};
}

HypothesisReport validate_initial(const Model& m, const InitialData& d, std::size_t grid_n) {
    if (grid_n < 2) throw PreconditionError("initial-data grid needs at least 2 points");
    if (!(d.x0 < 0.0)) throw PreconditionError("x0 must be negative");
    if (!m.window.strictly_contains(d.x0)) throw PreconditionError("x0 must lie inside the model window");
    if (!(d.z0 > 0.0)) throw PreconditionError("z0 must be positive");
    if (d.z0 > m.z_cap) throw PreconditionError("z0 exceeds the model's z_cap");
    if (!(d.eps >= 0.0) || !std::isfinite(d.eps)) throw PreconditionError("eps must be finite and >= 0");

    HypothesisCheck c{"g(x0,z,0) < 0 for z in [0,z0]", true, std::nullopt};
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double z = grid_point(0.0, d.z0, i, grid_n);
        record(c, m.g(d.x0, z, 0.0) < 0.0, z);
    }
    return HypothesisReport{{c}};
}

}  // namespace delaylab
