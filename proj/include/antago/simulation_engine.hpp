#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "antago/energy_shaping_controller.hpp"
#include "antago/force_observer.hpp"
#include "antago/ode.hpp"
#include "antago/plant_model.hpp"

namespace antago {

/// External force acting on the payload (positive values oppose positive x).
struct ForceModel {
    enum class Kind { constant, tanh_friction, spring };

    Kind kind = Kind::constant;
    double coefficient = 0.0;  // F0 [N], c [N] in c tanh(xdot), or k [N/m] in k x

    [[nodiscard]] static ForceModel constant(double F0) { return {Kind::constant, F0}; }
    [[nodiscard]] static ForceModel tanh_friction(double c) { return {Kind::tanh_friction, c}; }
    [[nodiscard]] static ForceModel spring(double k) { return {Kind::spring, k}; }

    bool operator==(const ForceModel&) const = default;
};

[[nodiscard]] std::string to_string(ForceModel::Kind kind);
[[nodiscard]] ForceModel::Kind parse_force_kind(const std::string& name);

/// tanh_friction uses xdot = p / M(x).
[[nodiscard]] double evaluate_force(const ForceModel& force, const PlantState& state, const PlantParams& params);

enum class SolverMethod { rk23, rk4 };

[[nodiscard]] std::string to_string(SolverMethod method);
[[nodiscard]] SolverMethod parse_solver_method(const std::string& name);

struct SolverOptions {
    SolverMethod method = SolverMethod::rk23;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 1e-2;
    double fixed_step = 1e-4;
    double output_interval = 1e-3;

    bool operator==(const SolverOptions&) const = default;
};

/// closed_loop runs the energy-shaping law; zero_flow holds both pump flows at zero.
enum class ControlMode { closed_loop, zero_flow };

[[nodiscard]] std::string to_string(ControlMode mode);
[[nodiscard]] ControlMode parse_control_mode(const std::string& name);

/// Step change of the setpoint at `time`.
struct SetpointChange {
    double time = 0.0;
    double x_star = 0.0;

    bool operator==(const SetpointChange&) const = default;
};

/// Initial condition in measured quantities; p(0) = M(x) xdot.
struct InitialCondition {
    double x = 0.0;
    double xdot = 0.0;
    double P1 = 0.0;
    double P2 = 0.0;
    std::optional<double> F_hat;  // defaults to alpha p(0), a zero initial estimate

    bool operator==(const InitialCondition&) const = default;
};

struct ScenarioConfig {
    std::string name;
    PlantParams params = PlantParams::reference();
    ControllerGains gains{1.0, 2.0, 10.0, 10.0};
    std::vector<SetpointChange> schedule{{0.0, 1e-3}};  // first entry must be at t = 0
    InitialCondition initial;
    ForceModel force;
    double duration = 10.0;
    double epsilon = 0.0;  // force-variation bound used for the attached gain report
    ControlMode mode = ControlMode::closed_loop;
    SolverOptions solver;

    void validate() const;
    [[nodiscard]] double setpoint_at(double t) const;
    [[nodiscard]] PlantState initial_state() const;
    [[nodiscard]] ObserverState initial_observer() const;
};

/// One recorded instant of the closed loop.
struct TrajectorySample {
    double t = 0.0;
    double x = 0.0;
    double xdot = 0.0;
    double p = 0.0;
    double P1 = 0.0;
    double P2 = 0.0;
    double U1 = 0.0;
    double U2 = 0.0;
    double F_hat = 0.0;
    double F_tilde = 0.0;
    double F_true = 0.0;
    double zeta = 0.0;
    double sigma = 0.0;
    double H = 0.0;
    double H_d = 0.0;
    double Psi = 0.0;
    double x_star = 0.0;

    bool operator==(const TrajectorySample&) const = default;
};

enum class SimulationStatus { completed, domain_exit, step_underflow, step_limit };

[[nodiscard]] std::string to_string(SimulationStatus status);

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    SimulationStatus status = SimulationStatus::completed;
    std::string message;
    std::optional<PlantState> offending_state;
    ode::Stats stats;
    DomainStabilityReport gain_report;

    [[nodiscard]] bool ok() const { return status == SimulationStatus::completed; }
};

/// Integration state: x, p, P1, P2, F_hat.
using AugmentedState = ode::Vec<5>;

/**
 * Rates of the augmented plant + observer system as integrated by simulate().
 * In closed_loop mode the pressure rows use the substituted (non-stiff) form
 * of the control law; see closed_loop_pressure_rates().
 */
[[nodiscard]] AugmentedState augmented_rates(double t, const AugmentedState& y, const ScenarioConfig& scenario);

/// Same rates assembled from open_loop_field(control_flows(...)) and observer_rate(); stiff, used as a check.
[[nodiscard]] AugmentedState augmented_rates_composed(double t, const AugmentedState& y,
                                                      const ScenarioConfig& scenario);

[[nodiscard]] TrajectorySample make_sample(double t, const AugmentedState& y, const ScenarioConfig& scenario);

[[nodiscard]] TrajectoryRecord simulate(const ScenarioConfig& scenario);

struct DiagnosticsOptions {
    double settle_band = 0.02;  // fraction of the last setpoint step
    double zeta_floor = 1e-9;   // [N]; samples below are excluded from the decay fit
};

struct DiagnosticsSummary {
    std::size_t samples = 0;
    double t_final = 0.0;
    std::string status;

    double max_psi = 0.0;
    double max_psi_increment = 0.0;  // largest Psi(t_k+1) - Psi(t_k), may be negative
    double max_psi_rise = 0.0;       // largest Psi(t) - min_{s <= t} Psi(s)

    double alpha = 0.0;
    double zeta_decay_rate = 0.0;  // NaN when fewer than two samples exceed the floor
    std::size_t zeta_fit_points = 0;

    double x_star = 0.0;
    double final_position_error = 0.0;
    double final_momentum = 0.0;
    double final_sigma = 0.0;
    double final_pressure_balance = 0.0;  // P1 A1 + P2 A2 - F_hat
    double final_F_tilde = 0.0;
    double final_F_true = 0.0;
    double settle_time = 0.0;
    bool settled = false;

    /// Samples where A1 + A2 = 0 exactly, or sign changes of A1 + A2 between samples.
    std::size_t symmetric_touches = 0;
    std::size_t symmetric_crossings = 0;
};

/// Throws std::invalid_argument for an empty record.
[[nodiscard]] DiagnosticsSummary diagnostics(const TrajectoryRecord& record, const ControllerGains& gains,
                                             const PlantParams& params, const DiagnosticsOptions& options = {});

}  // namespace antago
