#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "antago/simulation_engine.hpp"

namespace antago {

/// Malformed scenario text. `line()` is 0 when the problem is not tied to a line.
class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(int line, const std::string& message);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

/**
 * Scenario files are sectioned `key = value` text:
 *
 *     [plant]     L0 n_L D_s d_c k0|K0 V0 x0 x_M Gamma0 rho P_atm m R domain_margin
 *     [gains]     k_p k_m k_i alpha epsilon
 *     [force]     kind (constant|tanh_friction|spring) coefficient
 *     [solver]    method (rk23|rk4) rel_tol abs_tol max_step fixed_step output_interval
 *     [schedule]  x_star duration, plus repeatable `step = <time>, <x_star>`
 *     [initial]   x xdot P1 P2 F_hat
 *     [control]   mode (closed_loop|zero_flow)
 *     [scenario]  name description
 *
 * Everything after '#' is a comment. Keys are case-sensitive and SI units are
 * assumed throughout; unknown or duplicated keys are errors.
 */
[[nodiscard]] ScenarioConfig parse_scenario(const std::string& text);
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Text that parses back to an identical ScenarioConfig.
[[nodiscard]] std::string serialize_scenario(const ScenarioConfig& scenario);

/// Description line of a scenario file, empty if absent.
[[nodiscard]] std::string scenario_description(const std::string& text);

/// Scalar keys accepted by set_scenario_value(), e.g. "alpha", "R", "x_star".
[[nodiscard]] std::vector<std::string> scenario_scalar_keys();

/// Sets one scalar parameter by its file key. Geometry changes keep K0 and
/// rederive k0, except when k0 itself is set. Throws std::invalid_argument.
void set_scenario_value(ScenarioConfig& scenario, const std::string& key, double value);
[[nodiscard]] double get_scenario_value(const ScenarioConfig& scenario, const std::string& key);

// Shortest decimal text that reads back to the same double; locale independent.
[[nodiscard]] std::string format_double(double value);
[[nodiscard]] double parse_double(const std::string& text);

/// Column names of the trajectory CSV, in order.
[[nodiscard]] const std::vector<std::string>& trajectory_columns();

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples);
[[nodiscard]] std::vector<TrajectorySample> read_trajectory_csv(std::istream& in);

/// Named, formatted diagnostics of one run, in a fixed order. Shared by the
/// run summary and the sweep table so both report identical values.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> diagnostics_fields(const DiagnosticsSummary& summary,
                                                                                 const TrajectoryRecord& record);

/// `key = value` lines of diagnostics_fields(), preceded by the failure message if any.
[[nodiscard]] std::string format_diagnostics(const DiagnosticsSummary& summary, const TrajectoryRecord& record);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

struct PresetInfo {
    std::string name;
    std::filesystem::path path;
    std::string description;
};

/// $ANTAGO_PRESET_DIR when set, otherwise the directory configured at build time.
[[nodiscard]] std::filesystem::path preset_directory();
[[nodiscard]] std::vector<PresetInfo> list_presets(const std::filesystem::path& directory = preset_directory());

/// An existing file path is used as is; anything else is looked up as a preset name.
[[nodiscard]] std::filesystem::path resolve_scenario_path(const std::string& name_or_path,
                                                          const std::filesystem::path& directory = preset_directory());

}  // namespace antago
