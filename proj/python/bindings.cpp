#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "delaylab/entry_exit.hpp"
#include "delaylab/error.hpp"
#include "delaylab/experiment.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/integrate.hpp"
#include "delaylab/io.hpp"
#include "delaylab/model.hpp"

namespace py = pybind11;
using namespace delaylab;

namespace {

std::vector<double> eps_vector(const py::object& eps) {
    if (py::isinstance<py::float_>(eps) || py::isinstance<py::int_>(eps)) return {eps.cast<double>()};
    return eps.cast<std::vector<double>>();
}

py::dict trajectory_dict(const Trajectory& t) {
    py::list tt, tau, x, z, zeta;
    for (const auto& s : t.samples) {
        tt.append(s.t);
        tau.append(s.tau);
        x.append(s.x);
        z.append(s.z ? py::cast(*s.z) : py::none());
        zeta.append(s.zeta ? py::cast(*s.zeta) : py::none());
    }
    py::list events;
    for (const auto& e : t.events) events.append(e.index);
    py::dict d;
    d["chart"] = to_string(t.chart);
    d["eps"] = t.eps;
    d["t"] = tt;
    d["tau"] = tau;
    d["x"] = x;
    d["z"] = z;
    d["zeta"] = zeta;
    d["events"] = events;
    d["reached_section"] = t.reached_section;
    d["x_error_estimate"] = t.x_error_estimate;
    d["accepted_steps"] = t.accepted_steps;
    d["rejected_steps"] = t.rejected_steps;
    return d;
}

IntegratorControls controls(double rtol, double atol, std::size_t max_steps, double s_max) {
    IntegratorControls c;
    c.rel_tol = rtol;
    c.abs_tol = atol;
    c.max_steps = max_steps;
    c.s_max = s_max;
    return c;
}

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_delaylab, m) {
    m.doc() = "Bifurcation delay in planar slow-fast systems";

    auto base = py::register_exception<Error>(m, "DelaylabError", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainFault>(m, "DomainFault", base.ptr());
    py::register_exception<UnknownModel>(m, "UnknownModel", base.ptr());
    py::register_exception<NoExitInWindow>(m, "NoExitInWindow", base.ptr());
    py::register_exception<NumericsError>(m, "NumericsError", base.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());

    py::class_<Model>(m, "Model")
        .def_readonly("name", &Model::name)
        .def_property_readonly("f_text", [](const Model& s) { return s.f.text; })
        .def_property_readonly("g_text", [](const Model& s) { return s.g.text; })
        .def_property_readonly("window", [](const Model& s) { return py::make_tuple(s.window.x_min, s.window.x_max); })
        .def_readonly("z_cap", &Model::z_cap)
        .def("f", [](const Model& s, double x, double z, double eps) { return s.f(x, z, eps); }, py::arg("x"),
             py::arg("z") = 0.0, py::arg("eps") = 0.0)
        .def("g", [](const Model& s, double x, double z, double eps) { return s.g(x, z, eps); }, py::arg("x"),
             py::arg("z") = 0.0, py::arg("eps") = 0.0)
        .def("__repr__", [](const Model& s) {
            std::ostringstream os;
            os << "Model(" << s.name << ", f='" << s.f.text << "', g='" << s.g.text << "', window=[" << s.window.x_min
               << ", " << s.window.x_max << "])";
            return os.str();
        });

    m.def("builtin_model", &builtin_model, py::arg("name"));
    m.def("builtin_model_names", &builtin_model_names);
    m.def(
        "model_from_text",
        [](const std::string& f, const std::string& g, std::pair<double, double> window, double z_cap,
           const std::string& name) { return model_from_text(name, f, g, {window.first, window.second}, z_cap); },
        py::arg("f"), py::arg("g"), py::arg("window"), py::arg("z_cap") = 1.0, py::arg("name") = "custom");

    m.def(
        "check_hypotheses",
        [](const Model& model, std::size_t grid) {
            py::list out;
            for (const auto& c : check_hypotheses(model, grid).checks) {
                py::dict d;
                d["name"] = c.name;
                d["passed"] = c.passed;
                d["first_violation"] = c.first_violation ? py::cast(*c.first_violation) : py::none();
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("grid") = kDefaultHypothesisGrid);

    py::class_<EntryExitSolution>(m, "EntryExitSolution")
        .def_readonly("x0", &EntryExitSolution::x0)
        .def_readonly("x1", &EntryExitSolution::x1)
        .def_readonly("zeta0", &EntryExitSolution::zeta0)
        .def_readonly("tau1", &EntryExitSolution::tau1)
        .def_readonly("dx1_dx0", &EntryExitSolution::dx1_dx0)
        .def_readonly("residual", &EntryExitSolution::residual)
        .def("__repr__", [](const EntryExitSolution& s) {
            std::ostringstream os;
            os.precision(17);
            os << "EntryExitSolution(x0=" << s.x0 << ", x1=" << s.x1 << ", zeta0=" << s.zeta0 << ", tau1=" << s.tau1
               << ", dx1_dx0=" << s.dx1_dx0 << ")";
            return os.str();
        });

    m.def("solve_exit", [](const Model& model, double x0) { return solve_exit(model, x0); }, py::arg("model"),
          py::arg("x0"));
    m.def(
        "slow_curves",
        [](const Model& model, double x0, double x1_hat, std::size_t n) {
            const SlowCurves c = slow_curves(model, x0, x1_hat, n);
            py::dict d;
            d["x"] = c.x;
            d["zeta_minus"] = c.zeta_minus;
            d["tau_minus"] = c.tau_minus;
            d["zeta_plus"] = c.zeta_plus;
            d["tau_plus"] = c.tau_plus;
            d["tau1"] = c.tau1;
            return d;
        },
        py::arg("model"), py::arg("x0"), py::arg("x1_hat"), py::arg("n") = kDefaultCurveGrid);

    m.def(
        "simulate",
        [](const Model& model, double x0, double z0, double eps, const std::string& chart, double rtol, double atol,
           std::size_t max_steps) {
            validate_initial(model, {x0, z0, eps});
            const IntegratorControls c = controls(rtol, atol, max_steps, std::numeric_limits<double>::infinity());
            if (chart == "zeta") return trajectory_dict(integrate_zeta(model, {x0, z0, eps}, exit_section(z0, eps), c));
            if (chart != "xz") throw PreconditionError("chart must be 'zeta' or 'xz'");
            const Section stop = eps > 0.0 ? Section::z(z0, Crossing::Up).with_x_above(0.0)
                                           : Section::z(1e-3 * z0, Crossing::Down);
            return trajectory_dict(integrate_xz(model, {x0, z0, eps}, stop, c));
        },
        py::arg("model"), py::arg("x0"), py::arg("z0"), py::arg("eps"), py::arg("chart") = "zeta",
        py::arg("rtol") = 1e-9, py::arg("atol") = 1e-12, py::arg("max_steps") = 10'000'000);

    m.def(
        "max_zeta",
        [](const Model& model, double x0, double z0, double eps) {
            return min_z_exponent(integrate_zeta(model, {x0, z0, eps}, exit_section(z0, eps)));
        },
        py::arg("model"), py::arg("x0"), py::arg("z0"), py::arg("eps"),
        "Largest zeta = eps log(1/min z) on the trajectory to the exit section.");

    m.def("transversality_det", &transversality_det, py::arg("model"), py::arg("x_hat"), py::arg("x1"));
    m.def(
        "hausdorff_distance",
        [](const std::vector<Point2>& a, const std::vector<Point2>& b) { return hausdorff_distance(a, b); },
        py::arg("a"), py::arg("b"));

    m.def(
        "derivative_probe",
        [](const Model& model, double x0, double z0, double eps, double h) {
            const DerivativeProbe p = derivative_probe(model, x0, z0, eps, h);
            return py::make_tuple(p.value, p.uncertainty);
        },
        py::arg("model"), py::arg("x0"), py::arg("z0"), py::arg("eps"), py::arg("h"));

    m.def(
        "sweep",
        [](const Model& model, double x0, double z0, const py::object& eps, unsigned jobs, bool derivative,
           bool closeness) {
            SweepOptions o;
            o.jobs = jobs;
            o.derivative = derivative;
            o.closeness = closeness;
            const std::vector<double> list = eps_vector(eps);
            SweepReport r;
            {
                py::gil_scoped_release release;
                r = run_sweep(model, x0, z0, list, o);
            }
            return to_python(io::to_json(r, {}));
        },
        py::arg("model"), py::arg("x0"), py::arg("z0"), py::arg("eps"), py::arg("jobs") = 1,
        py::arg("derivative") = true, py::arg("closeness") = true,
        "Runs an eps-sweep and returns the report in its JSON form.");

    m.attr("__version__") = io::kToolVersion;
}
