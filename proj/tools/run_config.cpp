#include "run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "delaylab/error.hpp"

namespace delaylab::cli {
namespace {

template <class T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
    if (src) dst = src;
}

template <class T>
std::optional<T> field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (double d : v) out += (out.empty() ? "" : ",") + io::format_real(d);
    return out;
}

}  // namespace

void RunConfig::overlay(const RunConfig& top) {
    if (top.model) {
        f.reset();
        g.reset();
    }
    if (top.f || top.g) model.reset();
    take(model, top.model);
    take(f, top.f);
    take(g, top.g);
    take(window, top.window);
    take(z_cap, top.z_cap);
    take(x0, top.x0);
    take(z0, top.z0);
    take(eps, top.eps);
    take(delta, top.delta);
    take(closeness_delta, top.closeness_delta);
    take(rtol, top.rtol);
    take(atol, top.atol);
    take(max_steps, top.max_steps);
    take(t_max, top.t_max);
    take(chart, top.chart);
    take(out, top.out);
    take(formats, top.formats);
    take(jobs, top.jobs);
    take(grid, top.grid);
}

RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    static const char* const known[] = {
        "model", "f", "g", "window", "z_cap", "x0", "z0", "eps", "delta", "closeness_delta",
        "rtol", "atol", "max_steps", "t_max", "chart", "out", "formats", "jobs", "grid",
    };
    for (const auto& item : j.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw UsageError("unknown config key '" + item.key() + "'");
        }
    }
    RunConfig c;
    c.model = field<std::string>(j, "model");
    c.f = field<std::string>(j, "f");
    c.g = field<std::string>(j, "g");
    c.window = field<std::vector<double>>(j, "window");
    c.z_cap = field<double>(j, "z_cap");
    c.x0 = field<double>(j, "x0");
    c.z0 = field<double>(j, "z0");
    if (j.contains("eps") && j.at("eps").is_number()) {
        c.eps = std::vector<double>{j.at("eps").get<double>()};
    } else {
        c.eps = field<std::vector<double>>(j, "eps");
    }
    c.delta = field<double>(j, "delta");
    c.closeness_delta = field<double>(j, "closeness_delta");
    c.rtol = field<double>(j, "rtol");
    c.atol = field<double>(j, "atol");
    c.max_steps = field<double>(j, "max_steps");
    c.t_max = field<double>(j, "t_max");
    c.chart = field<std::string>(j, "chart");
    c.out = field<std::string>(j, "out");
    c.formats = field<std::vector<std::string>>(j, "formats");
    c.jobs = field<double>(j, "jobs");
    c.grid = field<double>(j, "grid");
    if (c.window && c.window->size() != 2) throw UsageError("config key 'window': expected [x_min, x_max]");
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    try {
        return config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw UsageError("malformed number '" + item + "' in list '" + text + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw UsageError("malformed number '" + item + "' in list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

Model resolve_model(const RunConfig& c) {
    if (c.model && (c.f || c.g)) throw UsageError("give either --model or --f/--g, not both");
    if (c.model) {
        Model m = builtin_model(*c.model);
        if (c.window) m.window = Window{(*c.window)[0], (*c.window)[1]};
        if (c.z_cap) m.z_cap = *c.z_cap;
        return make_model(m.name, m.f, m.g, m.window, m.z_cap);
    }
    if (!c.f || !c.g) throw UsageError("no model: pass --model NAME or both --f and --g with --window");
    if (!c.window) throw UsageError("--window X_MIN X_MAX is required with --f/--g");
    return model_from_text("custom", *c.f, *c.g, Window{(*c.window)[0], (*c.window)[1]}, c.z_cap.value_or(1.0));
}

std::string output_directory(const RunConfig& flags, const RunConfig& merged) {
    if (flags.out) return *flags.out;
    if (const char* env = std::getenv("DELAYLAB_OUT"); env && *env) return env;
    return merged.out.value_or(".");
}

io::Echo echo(const std::string& command, const RunConfig& c, const Model& m) {
    io::Echo e{{"command", command},
               {"model", m.name},
               {"f", m.f.text},
               {"g", m.g.text},
               {"window", io::format_real(m.window.x_min) + "," + io::format_real(m.window.x_max)},
               {"z_cap", io::format_real(m.z_cap)}};
    auto add = [&](const char* key, const std::optional<double>& v) {
        if (v) e.emplace_back(key, io::format_real(*v));
    };
    add("x0", c.x0);
    add("z0", c.z0);
    if (c.eps) e.emplace_back("eps", join(*c.eps));
    add("delta", c.delta);
    add("closeness_delta", c.closeness_delta);
    add("rtol", c.rtol);
    add("atol", c.atol);
    add("max_steps", c.max_steps);
    add("t_max", c.t_max);
    if (c.chart) e.emplace_back("chart", *c.chart);
    add("grid", c.grid);
    return e;
}

}  // namespace delaylab::cli
