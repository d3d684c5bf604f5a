// delaylab: entry-exit maps, trajectories, singular geometry and eps-sweeps
// for planar slow-fast systems x' = eps f(x,z,eps), z' = g(x,z,eps) z.
//
// Exit codes: 0 success, 1 runtime or domain error, 2 no exit inside the
// model window, 64 usage error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "delaylab/entry_exit.hpp"
#include "delaylab/error.hpp"
#include "delaylab/experiment.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/integrate.hpp"
#include "delaylab/io.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace delaylab;
using cli::RunConfig;
using cli::UsageError;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitNoExit = 2;
constexpr int kExitUsage = 64;

/// Raw flag values; copied into a RunConfig only when the flag was given.
struct Flags {
    std::string config;
    std::string model, f, g, chart, out, eps, formats;
    std::vector<double> window;
    double z_cap = 0, x0 = 0, z0 = 0, delta = 0, closeness_delta = 0, rtol = 0, atol = 0, max_steps = 0,
           t_max = 0, jobs = 0, grid = 0;
    bool curves = false;
};

struct Context {
    RunConfig flags;
    RunConfig merged;
    Model model;
    fs::path out_dir;
    io::Echo echo;
};

double require(const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string("missing required ") + flag);
    return *v;
}

std::size_t count_value(const std::optional<double>& v, std::size_t fallback, const char* what) {
    if (!v) return fallback;
    if (!(*v >= 1.0) || *v != std::floor(*v) || *v > 1e9) {
        throw UsageError(std::string(what) + " must be a positive integer");
    }
    return static_cast<std::size_t>(*v);
}

IntegratorControls controls_of(const RunConfig& c) {
    IntegratorControls ctl;
    if (c.rtol) ctl.rel_tol = *c.rtol;
    if (c.atol) ctl.abs_tol = *c.atol;
    if (c.max_steps) ctl.max_steps = count_value(c.max_steps, ctl.max_steps, "--max-steps");
    if (c.t_max) ctl.s_max = *c.t_max;
    return ctl;
}

std::ofstream open_output(const Context& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    const fs::path path = ctx.out_dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    return os;
}

void write_json(const Context& ctx, const std::string& name, const nlohmann::json& j) {
    auto os = open_output(ctx, name);
    os << j.dump(2) << '\n';
}

void print_solution(const EntryExitSolution& s) {
    std::cout << "x0       = " << io::format_real(s.x0) << '\n'
              << "x1       = " << io::format_real(s.x1) << '\n'
              << "zeta0    = " << io::format_real(s.zeta0) << '\n'
              << "tau1     = " << io::format_real(s.tau1) << '\n'
              << "dx1_dx0  = " << io::format_real(s.dx1_dx0) << '\n'
              << "residual = " << io::format_real(s.residual) << '\n';
}

int cmd_exit(const Context& ctx, bool curves) {
    const double x0 = require(ctx.merged.x0, "--x0");
    const EntryExitSolution sol = solve_exit(ctx.model, x0);
    print_solution(sol);
    write_json(ctx, "exit.json",
               {{"meta", io::meta_json(ctx.echo)},
                {"model", {{"name", ctx.model.name}, {"f", ctx.model.f.text}, {"g", ctx.model.g.text}}},
                {"solution", io::to_json(sol)}});
    if (curves) {
        const std::size_t n = count_value(ctx.merged.grid, kDefaultCurveGrid, "--grid");
        auto os = open_output(ctx, "slow_curves.csv");
        io::write_slow_curves_csv(os, slow_curves(ctx.model, x0, sol.x1, n), ctx.echo);
    }
    return kExitOk;
}

int cmd_simulate(const Context& ctx) {
    const RunConfig& c = ctx.merged;
    const double x0 = require(c.x0, "--x0");
    const double z0 = require(c.z0, "--z0");
    if (!c.eps || c.eps->size() != 1) throw UsageError("simulate needs a single --eps value");
    const double eps = c.eps->front();
    const std::string chart = c.chart.value_or("zeta");
    if (chart != "zeta" && chart != "xz") throw UsageError("--chart must be 'zeta' or 'xz'");

    const InitialData d{x0, z0, eps};
    const HypothesisReport init = validate_initial(ctx.model, d);
    if (!init.passed()) throw PreconditionError("initial data rejected:\n" + init.summary());

    const IntegratorControls ctl = controls_of(c);
    Trajectory traj;
    if (chart == "zeta") {
        traj = integrate_zeta(ctx.model, d, exit_section(z0, eps), ctl);
    } else if (eps > 0.0) {
        traj = integrate_xz(ctx.model, d, Section::z(z0, Crossing::Up).with_x_above(0.0), ctl);
    } else {
        // frozen slow variable: follow the fast fibre down towards the axis
        traj = integrate_xz(ctx.model, d, Section::z(1e-3 * z0, Crossing::Down), ctl);
    }
    auto os = open_output(ctx, "trajectory.csv");
    io::write_trajectory_csv(os, traj, ctx.echo);

    const Sample& last = traj.back();
    std::cout << "chart    = " << to_string(traj.chart) << '\n'
              << "samples  = " << traj.samples.size() << '\n'
              << "section  = " << (traj.reached_section ? "reached" : "not reached") << '\n'
              << "t_end    = " << io::format_real(last.t) << '\n'
              << "tau_end  = " << io::format_real(last.tau) << '\n'
              << "x_end    = " << io::format_real(last.x) << '\n';
    if (traj.chart == Chart::Zeta) std::cout << "max_zeta = " << io::format_real(min_z_exponent(traj)) << '\n';
    return kExitOk;
}

int cmd_sweep(const Context& ctx) {
    const RunConfig& c = ctx.merged;
    const double x0 = require(c.x0, "--x0");
    const double z0 = require(c.z0, "--z0");
    if (!c.eps || c.eps->empty()) throw UsageError("sweep needs a non-empty --eps list");

    SweepOptions opts;
    opts.controls = controls_of(c);
    opts.jobs = static_cast<unsigned>(count_value(c.jobs, 1, "--jobs"));
    if (c.delta) opts.section_delta = *c.delta;
    if (c.closeness_delta) opts.closeness_delta = *c.closeness_delta;

    std::vector<std::string> formats = c.formats.value_or(std::vector<std::string>{"json", "csv"});
    for (const auto& f : formats)
        if (f != "json" && f != "csv") throw UsageError("unknown output format '" + f + "'");

    const SweepReport report = run_sweep(ctx.model, x0, z0, *c.eps, opts);
    if (std::find(formats.begin(), formats.end(), "json") != formats.end()) {
        write_json(ctx, "sweep.json", io::to_json(report, ctx.echo));
    }
    if (std::find(formats.begin(), formats.end(), "csv") != formats.end()) {
        auto os = open_output(ctx, "sweep.csv");
        io::write_sweep_csv(os, report, ctx.echo);
    }

    std::cout << "reference x1 = " << io::format_real(report.reference.x1)
              << ", zeta0 = " << io::format_real(report.reference.zeta0)
              << ", tau1 = " << io::format_real(report.reference.tau1) << '\n';
    for (const auto& r : report.records) {
        std::cout << "eps = " << io::format_real(r.eps);
        if (r.ok) {
            std::cout << "  max_zeta = " << io::format_real(r.minz_exponent) << "  exit_x = " << io::format_real(r.exit_x)
                      << "  hausdorff = " << io::format_real(r.hausdorff);
        } else {
            std::cout << "  FAILED: " << r.error;
        }
        std::cout << std::endl;
        std::cerr << "eps = " << io::format_real(r.eps) << " took " << r.wall_seconds << " s\n";
    }
    for (const auto& fit : report.rates) {
        std::cout << "rate[" << fit.observable << "] = " << (fit.rate ? io::format_real(*fit.rate) : "n/a") << '\n';
    }
    return kExitOk;
}

int cmd_geometry(const Context& ctx) {
    const RunConfig& c = ctx.merged;
    const double x0 = require(c.x0, "--x0");
    const double z0 = c.z0.value_or(0.1);
    const std::size_t n = count_value(c.grid, kDefaultCurveGrid, "--grid");

    const EntryExitSolution sol = solve_exit(ctx.model, x0);
    const double delta = c.delta.value_or(0.25 * delta_bound(x0, sol.x1));
    const ManifoldPair manifolds = build_manifolds(ctx.model, x0, sol.x1, delta, n);
    const SingularConfiguration config = build_configuration(ctx.model, sol, z0, n);

    double det_min = std::numeric_limits<double>::infinity();
    double det_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : config.gamma0) {
        const double det = transversality_det(ctx.model, p.x, sol.x1);
        det_min = std::min(det_min, det);
        det_max = std::max(det_max, det);
    }

    {
        auto os = open_output(ctx, "configuration.csv");
        io::write_configuration_csv(os, config, ctx.echo);
    }
    {
        auto os = open_output(ctx, "gamma0.csv");
        io::write_curve_csv(os, config, ctx.echo);
    }
    {
        auto os = open_output(ctx, "manifold_L.csv");
        io::write_patch_csv(os, manifolds.left, ctx.echo);
    }
    {
        auto os = open_output(ctx, "manifold_R.csv");
        io::write_patch_csv(os, manifolds.right, ctx.echo);
    }

    print_solution(sol);
    std::cout << "delta    = " << io::format_real(delta) << '\n'
              << "det_min  = " << io::format_real(det_min) << '\n'
              << "det_max  = " << io::format_real(det_max) << '\n';
    return kExitOk;
}

int cmd_check(const Context& ctx) {
    const std::size_t n = count_value(ctx.merged.grid, kDefaultHypothesisGrid, "--grid");
    HypothesisReport report = check_hypotheses(ctx.model, n);
    if (ctx.merged.x0 && ctx.merged.z0) {
        const HypothesisReport init = validate_initial(ctx.model, {*ctx.merged.x0, *ctx.merged.z0, 0.0}, n);
        report.checks.insert(report.checks.end(), init.checks.begin(), init.checks.end());
    }
    std::cout << report.summary();
    return report.passed() ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delaylab: bifurcation delay in planar slow-fast systems"};
    app.set_version_flag("--version", std::string(io::kToolVersion));
    app.require_subcommand(1);

    Flags fl;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", fl.config, "JSON config file; flags override its values");
        sub->add_option("--model", fl.model, "builtin model: linear, scaled, quadratic");
        sub->add_option("--f", fl.f, "slow drift f(x, z, eps) as an expression");
        sub->add_option("--g", fl.g, "fast rate g(x, z, eps) as an expression");
        sub->add_option("--window", fl.window, "validity window X_MIN X_MAX")->expected(2);
        sub->add_option("--z-cap", fl.z_cap, "largest z the model is meant for");
        sub->add_option("--x0", fl.x0, "entry point x0 < 0");
        sub->add_option("--out", fl.out, "output directory (else $DELAYLAB_OUT, then the config file, then .)");
        sub->add_option("--grid", fl.grid, "sampling grid size")->type_name("INT");
    };
    auto add_integration = [&](CLI::App* sub) {
        sub->add_option("--z0", fl.z0, "initial height z0 > 0");
        sub->add_option("--eps", fl.eps, "eps value, or comma-separated list for sweep");
        sub->add_option("--rtol", fl.rtol, "integrator relative tolerance");
        sub->add_option("--atol", fl.atol, "integrator absolute tolerance");
        sub->add_option("--max-steps", fl.max_steps, "integrator step limit")->type_name("INT");
    };

    CLI::App* exit_cmd = app.add_subcommand("exit", "entry-exit map and singular-limit scalars");
    add_common(exit_cmd);
    exit_cmd->add_flag("--curves", fl.curves, "also write slow_curves.csv");

    CLI::App* sim_cmd = app.add_subcommand("simulate", "integrate one trajectory to the exit section");
    add_common(sim_cmd);
    add_integration(sim_cmd);
    sim_cmd->add_option("--chart", fl.chart, "zeta (default) or xz");
    sim_cmd->add_option("--t-max", fl.t_max, "stop the independent variable here if no section is met");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "eps-sweep of the delayed passage");
    add_common(sweep_cmd);
    add_integration(sweep_cmd);
    sweep_cmd->add_option("--delta", fl.delta, "section half-width");
    sweep_cmd->add_option("--closeness-delta", fl.closeness_delta, "margin of the manifold-closeness window");
    sweep_cmd->add_option("--jobs", fl.jobs, "worker threads")->type_name("INT");
    sweep_cmd->add_option("--format", fl.formats, "json,csv (default both)");

    CLI::App* geo_cmd = app.add_subcommand("geometry", "singular configuration and slow manifolds");
    add_common(geo_cmd);
    geo_cmd->add_option("--z0", fl.z0, "height of the fast segments (default 0.1)");
    geo_cmd->add_option("--delta", fl.delta, "section half-width, < min(|x0|, x1)/2");

    CLI::App* check_cmd = app.add_subcommand("check", "report the model's standing hypotheses");
    add_common(check_cmd);
    check_cmd->add_option("--z0", fl.z0, "also check the initial height");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        RunConfig flags;
        auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
        if (given("--model")) flags.model = fl.model;
        if (given("--f")) flags.f = fl.f;
        if (given("--g")) flags.g = fl.g;
        if (given("--window")) flags.window = fl.window;
        if (given("--z-cap")) flags.z_cap = fl.z_cap;
        if (given("--x0")) flags.x0 = fl.x0;
        if (given("--z0")) flags.z0 = fl.z0;
        if (given("--eps")) flags.eps = cli::parse_real_list(fl.eps);
        if (given("--delta")) flags.delta = fl.delta;
        if (given("--closeness-delta")) flags.closeness_delta = fl.closeness_delta;
        if (given("--rtol")) flags.rtol = fl.rtol;
        if (given("--atol")) flags.atol = fl.atol;
        if (given("--max-steps")) flags.max_steps = fl.max_steps;
        if (given("--t-max")) flags.t_max = fl.t_max;
        if (given("--chart")) flags.chart = fl.chart;
        if (given("--out")) flags.out = fl.out;
        if (given("--format")) flags.formats = std::vector<std::string>{};
        if (given("--format")) {
            std::stringstream ss(fl.formats);
            for (std::string item; std::getline(ss, item, ',');) flags.formats->push_back(item);
        }
        if (given("--jobs")) flags.jobs = fl.jobs;
        if (given("--grid")) flags.grid = fl.grid;

        Context ctx{flags, {}, {}, {}, {}};
        if (given("--config")) ctx.merged = cli::load_config_file(fl.config);
        ctx.merged.overlay(flags);
        ctx.model = cli::resolve_model(ctx.merged);
        ctx.out_dir = cli::output_directory(flags, ctx.merged);
        ctx.echo = cli::echo(sub->get_name(), ctx.merged, ctx.model);

        const std::string& name = sub->get_name();
        if (name == "exit") return cmd_exit(ctx, fl.curves);
        if (name == "simulate") return cmd_simulate(ctx);
        if (name == "sweep") return cmd_sweep(ctx);
        if (name == "geometry") return cmd_geometry(ctx);
        return cmd_check(ctx);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NoExitInWindow& e) {
        std::cerr << "no exit: " << e.what() << '\n';
        return kExitNoExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
