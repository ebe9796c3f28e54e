// Command-line front end: run scenarios, sweep a parameter, run the
// verification suites and list presets.

#include <CLI11.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "antago/scenario_io.hpp"
#include "antago/verification.hpp"

namespace fs = std::filesystem;
using namespace antago;

namespace {

// Exit codes: 0 success, 1 usage/input error or oracle violation, 2 simulation failure.
constexpr int kInputError = 1;
constexpr int kSimulationFailure = 2;

struct SolverOverrides {
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<std::string> method;
    std::vector<std::string> assignments;  // key=value
};

void add_solver_flags(CLI::App* cmd, SolverOverrides& o)
{
    cmd->add_option("--rel-tol", o.rel_tol, "Relative tolerance of the adaptive solver");
    cmd->add_option("--abs-tol", o.abs_tol, "Absolute tolerance of the adaptive solver");
    cmd->add_option("--method", o.method, "Integrator")->check(CLI::IsMember({"rk23", "rk4"}));
    cmd->add_option("--set", o.assignments, "Override a scalar scenario key, e.g. --set alpha=12");
}

ScenarioConfig load_with_overrides(const std::string& name_or_path, const SolverOverrides& o)
{
    ScenarioConfig sc = load_scenario(resolve_scenario_path(name_or_path));
    if (o.rel_tol) sc.solver.rel_tol = *o.rel_tol;
    if (o.abs_tol) sc.solver.abs_tol = *o.abs_tol;
    if (o.method) sc.solver.method = parse_solver_method(*o.method);
    for (const auto& a : o.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + a + "'");
        set_scenario_value(sc, a.substr(0, eq), parse_double(a.substr(eq + 1)));
    }
    sc.validate();
    return sc;
}

std::string trajectory_text(const std::vector<TrajectorySample>& samples)
{
    std::ostringstream os;
    write_trajectory_csv(os, samples);
    return os.str();
}

int cmd_run(const std::string& scenario_name, const std::optional<std::string>& out,
            const std::optional<std::string>& summary_out, const SolverOverrides& o)
{
    const ScenarioConfig sc = load_with_overrides(scenario_name, o);
    const TrajectoryRecord rec = simulate(sc);
    const DiagnosticsSummary d = diagnostics(rec, sc.gains, sc.params);
    const std::string summary = format_diagnostics(d, rec);

    if (out) {
        write_file_atomically(*out, trajectory_text(rec.samples));
        std::cout << "scenario = " << (sc.name.empty() ? scenario_name : sc.name) << "\n" << summary;
    } else {
        write_trajectory_csv(std::cout, rec.samples);
        std::cerr << summary;
    }
    if (summary_out) write_file_atomically(*summary_out, summary);

    if (!rec.ok()) {
        std::cerr << "error: simulation " << to_string(rec.status) << ": " << rec.message << "\n";
        return kSimulationFailure;
    }
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed)
{
    std::vector<std::string> suites;
    if (suite == "all") {
        suites = verification_suites();
    } else {
        suites = {suite};
    }
    bool ok = true;
    for (const auto& s : suites) {
        const VerificationReport r = run_verification(s, seed);
        std::cout << format_report(r);
        ok = ok && r.passed();
    }
    return ok ? 0 : kInputError;
}

std::vector<double> sweep_values(const std::string& values, const std::string& range)
{
    std::vector<double> out;
    if (!values.empty()) {
        std::stringstream ss(values);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    } else {
        // lo:hi:n, n points including both ends
        std::vector<std::string> parts;
        std::stringstream ss(range);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3) throw std::invalid_argument("--range expects lo:hi:n");
        const double lo = parse_double(parts[0]);
        const double hi = parse_double(parts[1]);
        const int n = std::stoi(parts[2]);
        if (n < 1) throw std::invalid_argument("--range needs at least one point");
        for (int i = 0; i < n; ++i) {
            out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    }
    if (out.empty()) throw std::invalid_argument("sweep needs --values or --range");
    return out;
}

int cmd_sweep(const std::string& scenario_name, const std::string& param, const std::string& values,
              const std::string& range, const std::optional<std::string>& out,
              const std::optional<std::string>& trajectory_dir, unsigned jobs, const SolverOverrides& o)
{
    const ScenarioConfig base = load_with_overrides(scenario_name, o);
    (void)get_scenario_value(base, param);  // rejects unknown keys before any run
    const std::vector<double> grid = sweep_values(values, range);
    if (trajectory_dir) fs::create_directories(*trajectory_dir);

    struct Row {
        std::vector<std::pair<std::string, std::string>> fields;
        bool ok = false;
        std::string error;
    };
    std::vector<Row> rows(grid.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                ScenarioConfig sc = base;
                set_scenario_value(sc, param, grid[i]);
                sc.validate();
                const TrajectoryRecord rec = simulate(sc);
                const DiagnosticsSummary d = diagnostics(rec, sc.gains, sc.params);
                rows[i].fields = diagnostics_fields(d, rec);
                rows[i].ok = rec.ok();
                if (trajectory_dir) {
                    const fs::path file = fs::path(*trajectory_dir) / (param + "_" + format_double(grid[i]) + ".csv");
                    write_file_atomically(file, trajectory_text(rec.samples));
                }
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Header from the first successful row; failed rows keep the column count.
    std::vector<std::string> header;
    for (const auto& r : rows) {
        if (!r.fields.empty()) {
            for (const auto& [k, v] : r.fields) header.push_back(k);
            break;
        }
    }
    std::ostringstream csv;
    csv << "parameter,value";
    for (const auto& h : header) csv << "," << h;
    csv << "\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << param << "," << format_double(grid[i]);
        if (rows[i].fields.empty()) {
            all_ok = false;
            std::cerr << "error: " << param << " = " << format_double(grid[i]) << ": " << rows[i].error << "\n";
            for (std::size_t k = 0; k < header.size(); ++k) csv << "," << (header[k] == "status" ? "error" : "nan");
        } else {
            all_ok = all_ok && rows[i].ok;
            for (const auto& [k, v] : rows[i].fields) csv << "," << v;
        }
        csv << "\n";
    }
    if (out) {
        write_file_atomically(*out, csv.str());
    } else {
        std::cout << csv.str();
    }
    return all_ok ? 0 : kSimulationFailure;
}

int cmd_presets()
{
    const fs::path dir = preset_directory();
    const auto presets = list_presets(dir);
    if (presets.empty()) {
        std::cerr << "no presets found in " << dir.string() << "\n";
        return kInputError;
    }
    std::size_t width = 0;
    for (const auto& p : presets) width = std::max(width, p.name.size());
    for (const auto& p : presets) {
        std::cout << p.name << std::string(width + 2 - p.name.size(), ' ') << p.description << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulation and verification of an antagonistic bellow actuator pair"};
    app.require_subcommand(1);

    std::string scenario_name;
    std::optional<std::string> out;
    std::optional<std::string> summary_out;
    SolverOverrides overrides;
    auto* run = app.add_subcommand("run", "Simulate a scenario file or preset and write its trajectory CSV");
    run->add_option("scenario", scenario_name, "Scenario file or preset name")->required();
    run->add_option("--out", out, "Trajectory CSV path (stdout when omitted)");
    run->add_option("--summary", summary_out, "Also write the diagnostics summary to this file");
    add_solver_flags(run, overrides);

    std::string suite = "all";
    std::uint64_t seed = 1;
    auto* verify = app.add_subcommand("verify", "Run a numerical oracle suite");
    std::vector<std::string> suite_names = verification_suites();
    suite_names.push_back("all");
    verify->add_option("suite", suite, "Suite name or 'all'")->check(CLI::IsMember(suite_names));
    verify->add_option("--seed", seed, "Seed of the random sample points");

    std::string param;
    std::string values;
    std::string range;
    std::optional<std::string> trajectory_dir;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "Run a scenario over values of one scalar parameter");
    sweep->add_option("scenario", scenario_name, "Scenario file or preset name")->required();
    sweep->add_option("--param", param, "Scalar scenario key, e.g. alpha or R")->required();
    auto* values_opt = sweep->add_option("--values", values, "Comma-separated values");
    auto* range_opt = sweep->add_option("--range", range, "lo:hi:n, n evenly spaced values");
    values_opt->excludes(range_opt);
    sweep->add_option("--out", out, "Summary CSV path (stdout when omitted)");
    sweep->add_option("--trajectories", trajectory_dir, "Directory for one trajectory CSV per value");
    sweep->add_option("--jobs", jobs, "Scenarios run in parallel");
    add_solver_flags(sweep, overrides);

    auto* presets = app.add_subcommand("presets", "List the bundled scenario presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_name, out, summary_out, overrides);
        if (verify->parsed()) return cmd_verify(suite, seed);
        if (sweep->parsed()) {
            if (values.empty() && range.empty()) throw std::invalid_argument("sweep needs --values or --range");
            return cmd_sweep(scenario_name, param, values, range, out, trajectory_dir, jobs, overrides);
        }
        if (presets->parsed()) return cmd_presets();
    } catch (const ScenarioParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return 0;
}
