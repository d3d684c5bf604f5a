#include "delaylab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "delaylab/error.hpp"

namespace delaylab::io {
namespace {

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

void begin(std::ostream& os, const Echo& echo, const char* columns) {
    os << header_line(echo) << '\n' << columns << '\n';
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string header_line(const Echo& echo) {
    std::string out = std::string("# ") + kToolName + " " + kToolVersion;
    for (const auto& [key, value] : echo) {
        out += ' ';
        out += key;
        out += '=';
        if (value.find_first_of(" \t\"") != std::string::npos) {
            out += '"';
            for (char c : value) {
                if (c == '"') out += '\\';
                out += c;
            }
            out += '"';
        } else {
            out += value;
        }
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Echo& echo) {
    begin(os, echo, "t,tau,x,z,zeta,event");
    std::size_t next_event = 0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        os << format_real(s.t) << ',' << format_real(s.tau) << ',' << format_real(s.x) << ',' << cell(s.z) << ','
           << cell(s.zeta) << ',';
        if (next_event < traj.events.size() && traj.events[next_event].index == i) {
            os << "section";
            ++next_event;
        }
        os << '\n';
    }
}

void write_slow_curves_csv(std::ostream& os, const SlowCurves& c, const Echo& echo) {
    begin(os, echo, "x,zeta_minus,tau_minus,zeta_plus,tau_plus");
    for (std::size_t i = 0; i < c.x.size(); ++i) {
        os << format_real(c.x[i]) << ',' << format_real(c.zeta_minus[i]) << ',' << format_real(c.tau_minus[i])
           << ',' << format_real(c.zeta_plus[i]) << ',' << format_real(c.tau_plus[i]) << '\n';
    }
}

void write_configuration_csv(std::ostream& os, const SingularConfiguration& c, const Echo& echo) {
    begin(os, echo, "piece,x,z,zeta,tau");
    const std::pair<const char*, const std::vector<ConfigPoint>*> pieces[] = {
        {"gamma1", &c.gamma1}, {"gamma0", &c.gamma0}, {"gamma2", &c.gamma2}};
    for (const auto& [name, points] : pieces) {
        for (const auto& p : *points) {
            os << name << ',' << format_real(p.x) << ',' << format_real(p.z) << ',' << format_real(p.zeta) << ','
               << format_real(p.tau) << '\n';
        }
    }
}

void write_curve_csv(std::ostream& os, const SingularConfiguration& c, const Echo& echo) {
    begin(os, echo, "x,zeta,tau");
    for (const auto& p : c.gamma0) {
        os << format_real(p.x) << ',' << format_real(p.zeta) << ',' << format_real(p.tau) << '\n';
    }
}

void write_patch_csv(std::ostream& os, const ManifoldPatch& p, const Echo& echo) {
    begin(os, echo, "param1,param2,x,zeta,tau");
    for (std::size_t i = 0; i < p.param1.size(); ++i) {
        for (std::size_t j = 0; j < p.param2.size(); ++j) {
            const Vec3& q = p.points[p.index(i, j)];
            os << format_real(p.param1[i]) << ',' << format_real(p.param2[j]) << ',' << format_real(q[0]) << ','
               << format_real(q[1]) << ',' << format_real(q[2]) << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& os, const SweepReport& r, const Echo& echo) {
    begin(os, echo,
          "eps,ok,minz_exponent,exit_x,hausdorff,tau_exit,d_exit_dx0,d_exit_uncertainty,manifold_gap,steps,error");
    for (const auto& rec : r.records) {
        os << format_real(rec.eps) << ',' << (rec.ok ? 1 : 0) << ',';
        if (rec.ok) {
            os << format_real(rec.minz_exponent) << ',' << format_real(rec.exit_x) << ',' << format_real(rec.hausdorff)
               << ',' << format_real(rec.tau_exit) << ',' << format_real(rec.d_exit_dx0) << ','
               << format_real(rec.d_exit_uncertainty) << ',' << format_real(rec.manifold_gap) << ',' << rec.steps
               << ',';
        } else {
            std::string msg = rec.error;
            for (char& c : msg)
                if (c == '\n' || c == ',' || c == '"') c = ' ';
            os << ",,,,,,,," << msg;
        }
        os << '\n';
    }
}

nlohmann::json meta_json(const Echo& echo) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : echo) params[k] = v;
    return {{"tool", kToolName}, {"version", kToolVersion}, {"parameters", params}};
}

nlohmann::json to_json(const EntryExitSolution& s) {
    return {{"x0", s.x0},       {"x1", s.x1},           {"zeta0", s.zeta0},
            {"tau1", s.tau1},   {"dx1_dx0", s.dx1_dx0}, {"residual", s.residual}};
}

nlohmann::json to_json(const SweepReport& r, const Echo& echo) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : r.records) {
        nlohmann::json j = {{"eps", rec.eps}, {"ok", rec.ok}};
        if (rec.ok) {
            j["minz_exponent"] = rec.minz_exponent;
            j["exit_x"] = rec.exit_x;
            j["hausdorff"] = rec.hausdorff;
            j["tau_exit"] = rec.tau_exit;
            j["d_exit_dx0"] = rec.d_exit_dx0;
            j["d_exit_uncertainty"] = rec.d_exit_uncertainty;
            j["manifold_gap"] = rec.manifold_gap;
            j["steps"] = rec.steps;
        } else {
            j["error"] = rec.error;
        }
        records.push_back(std::move(j));
    }
    nlohmann::json rates = nlohmann::json::object();
    for (const auto& fit : r.rates) {
        rates[fit.observable] = {{"eps", fit.eps},
                                 {"error", fit.error},
                                 {"rate", fit.rate ? nlohmann::json(*fit.rate) : nlohmann::json(nullptr)}};
    }
    return {{"meta", meta_json(echo)},
            {"model", {{"name", r.model}, {"f", r.f_text}, {"g", r.g_text}}},
            {"x0", r.x0},
            {"z0", r.z0},
            {"reference", to_json(r.reference)},
            {"records", records},
            {"rates", rates},
            {"minz_richardson", r.minz_richardson ? nlohmann::json(*r.minz_richardson) : nlohmann::json(nullptr)}};
}

std::optional<double> CsvTable::number(std::size_t row, const std::string& column) const {
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] != column) continue;
        const std::string& text = cells.at(row).at(k);
        if (text.empty()) return std::nullopt;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw Error("malformed number '" + text + "' in column " + column);
        }
        return v;
    }
    throw Error("no column named " + column);
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string field;
        std::istringstream ss(s);
        while (std::getline(ss, field, ',')) out.push_back(field);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (t.header.empty()) t.header = line;
            continue;
        }
        if (t.columns.empty()) {
            t.columns = split(line);
            continue;
        }
        auto row = split(line);
        row.resize(t.columns.size());
        t.cells.push_back(std::move(row));
    }
    return t;
}

}  // namespace delaylab::io
