#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delaylab/entry_exit.hpp"
#include "delaylab/experiment.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/integrate.hpp"

namespace delaylab::io {

inline constexpr const char* kToolName = "delaylab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Parameter echo written at the top of every output file.
using Echo = std::vector<std::pair<std::string, std::string>>;

/// 17 significant digits, '.' decimal point; round-trips every double.
std::string format_real(double v);

/// "# delaylab 0.1.0 key=value key=value ..." (values with spaces are quoted).
std::string header_line(const Echo& echo);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Echo& echo);
void write_slow_curves_csv(std::ostream& os, const SlowCurves& c, const Echo& echo);
void write_configuration_csv(std::ostream& os, const SingularConfiguration& c, const Echo& echo);
void write_curve_csv(std::ostream& os, const SingularConfiguration& c, const Echo& echo);
void write_patch_csv(std::ostream& os, const ManifoldPatch& p, const Echo& echo);
void write_sweep_csv(std::ostream& os, const SweepReport& r, const Echo& echo);

nlohmann::json meta_json(const Echo& echo);
nlohmann::json to_json(const EntryExitSolution& s);
nlohmann::json to_json(const SweepReport& r, const Echo& echo);

/// A parsed CSV file: header comment, column names, rows (empty cells are nullopt).
struct CsvTable {
    std::string header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> cells;

    std::optional<double> number(std::size_t row, const std::string& column) const;
};

CsvTable read_csv(std::istream& is);

}  // namespace delaylab::io
