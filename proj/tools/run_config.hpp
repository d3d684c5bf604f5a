#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaylab/io.hpp"
#include "delaylab/model.hpp"

namespace delaylab::cli {

/// Bad flags, unreadable config or missing required values; exit code 64.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every setting a subcommand may read. Config-file values are loaded first,
/// flags given on the command line replace them field by field.
struct RunConfig {
    std::optional<std::string> model;
    std::optional<std::string> f;
    std::optional<std::string> g;
    std::optional<std::vector<double>> window;
    std::optional<double> z_cap;
    std::optional<double> x0;
    std::optional<double> z0;
    std::optional<std::vector<double>> eps;
    std::optional<double> delta;
    std::optional<double> closeness_delta;
    std::optional<double> rtol;
    std::optional<double> atol;
    std::optional<double> max_steps;
    std::optional<double> t_max;
    std::optional<std::string> chart;
    std::optional<std::string> out;
    std::optional<std::vector<std::string>> formats;
    std::optional<double> jobs;
    std::optional<double> grid;

    /// Field-wise overlay; a model name in `top` drops f/g from below and vice versa.
    void overlay(const RunConfig& top);
};

/// Parses a JSON config document; type errors name the offending key.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// "0.2,0.1,0.05" or a single number; throws UsageError on empty or malformed lists.
std::vector<double> parse_real_list(const std::string& text);

Model resolve_model(const RunConfig& c);

/// --out, then $DELAYLAB_OUT, then the config's "out", then ".".
std::string output_directory(const RunConfig& flags, const RunConfig& merged);

/// Model spec and every set parameter, for file headers.
io::Echo echo(const std::string& command, const RunConfig& c, const Model& m);

}  // namespace delaylab::cli
