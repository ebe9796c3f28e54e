#include "antago/simulation_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace antago {

std::string to_string(ForceModel::Kind kind)
{
    switch (kind) {
    case ForceModel::Kind::constant: return "constant";
    case ForceModel::Kind::tanh_friction: return "tanh_friction";
    case ForceModel::Kind::spring: return "spring";
    }
    return "unknown";
}

ForceModel::Kind parse_force_kind(const std::string& name)
{
    if (name == "constant") return ForceModel::Kind::constant;
    if (name == "tanh_friction") return ForceModel::Kind::tanh_friction;
    if (name == "spring") return ForceModel::Kind::spring;
    throw std::invalid_argument("unknown force kind '" + name + "' (expected constant, tanh_friction or spring)");
}

double evaluate_force(const ForceModel& force, const PlantState& state, const PlantParams& params)
{
    switch (force.kind) {
    case ForceModel::Kind::constant: return force.coefficient;
    case ForceModel::Kind::tanh_friction: return force.coefficient * std::tanh(state.p / total_mass(state.x, params));
    case ForceModel::Kind::spring: return force.coefficient * state.x;
    }
    return 0.0;
}

std::string to_string(SolverMethod method)
{
    return method == SolverMethod::rk23 ? "rk23" : "rk4";
}

SolverMethod parse_solver_method(const std::string& name)
{
    if (name == "rk23") return SolverMethod::rk23;
    if (name == "rk4") return SolverMethod::rk4;
    throw std::invalid_argument("unknown solver method '" + name + "' (expected rk23 or rk4)");
}

std::string to_string(ControlMode mode)
{
    return mode == ControlMode::closed_loop ? "closed_loop" : "zero_flow";
}

ControlMode parse_control_mode(const std::string& name)
{
    if (name == "closed_loop") return ControlMode::closed_loop;
    if (name == "zero_flow") return ControlMode::zero_flow;
    throw std::invalid_argument("unknown control mode '" + name + "' (expected closed_loop or zero_flow)");
}

std::string to_string(SimulationStatus status)
{
    switch (status) {
    case SimulationStatus::completed: return "completed";
    case SimulationStatus::domain_exit: return "domain_exit";
    case SimulationStatus::step_underflow: return "step_underflow";
    case SimulationStatus::step_limit: return "step_limit";
    }
    return "unknown";
}

void ScenarioConfig::validate() const
{
    params.validate();
    gains.validate();
    const auto fail = [](const std::string& what) { throw ParameterError(what); };
    if (!(duration > 0.0)) fail("duration must be positive");
    if (!(epsilon >= 0.0)) fail("epsilon must be non-negative");
    if (!(solver.rel_tol > 0.0 && solver.abs_tol > 0.0)) fail("solver tolerances must be positive");
    if (!(solver.max_step > 0.0 && solver.fixed_step > 0.0)) fail("solver step sizes must be positive");
    if (!(solver.output_interval > 0.0)) fail("output_interval must be positive");
    if (schedule.empty() || schedule.front().time != 0.0) fail("setpoint schedule must start at t = 0");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (i > 0 && !(schedule[i].time > schedule[i - 1].time)) fail("setpoint change times must increase");
        if (!params.geometry.admits(schedule[i].x_star)) {
            std::ostringstream os;
            os << "setpoint x_star = " << schedule[i].x_star << " m outside the admissible domain";
            fail(os.str());
        }
    }
    if (!params.geometry.admits(initial.x)) {
        std::ostringstream os;
        os << "initial position x = " << initial.x << " m outside the admissible domain";
        fail(os.str());
    }
}

double ScenarioConfig::setpoint_at(double t) const
{
    double x_star = schedule.front().x_star;
    for (const auto& change : schedule) {
        if (t >= change.time) {
            x_star = change.x_star;
        }
    }
    return x_star;
}

PlantState ScenarioConfig::initial_state() const
{
    return {initial.x, total_mass(initial.x, params) * initial.xdot, initial.P1, initial.P2};
}

ObserverState ScenarioConfig::initial_observer() const
{
    const PlantState s = initial_state();
    ObserverState obs = unbiased_observer(gains.alpha, s.p);
    if (initial.F_hat) {
        obs.F_hat = *initial.F_hat;
    }
    return obs;
}

namespace {

PlantState plant_part(const AugmentedState& y)
{
    return {y[0], y[1], y[2], y[3]};
}

// Fused evaluation of the integrated field at an explicit setpoint.
AugmentedState rates_at(const AugmentedState& y, double x_star, const ScenarioConfig& sc)
{
    const PlantParams& params = sc.params;
    const ControllerGains& gains = sc.gains;
    const double x = y[0];
    const double p = y[1];
    const double P1 = y[2];
    const double P2 = y[3];
    const double F_hat = y[4];

    const VolumeTerms vt = volume_terms(x, params.geometry);
    const auto [V1, V2] = vt.volume;
    const auto [A1, A2] = vt.gradient;
    const auto [dA1, dA2] = vt.curvature;
    const double Gamma0 = params.fluid.Gamma0;
    const double rho = params.fluid.rho;
    const double M = params.m + (V1 + V2) * rho;
    const double v = p / M;

    const double dH_dx = -p * p * rho * (A1 + A2) / (2.0 * M * M) + pressure_energy_density(P1, params.fluid) * A1 +
                         pressure_energy_density(P2, params.fluid) * A2;
    const double dH_dP1 = V1 * std::expm1(P1 / Gamma0);
    const double dH_dP2 = V2 * std::expm1(P2 / Gamma0);
    const double drive = -dH_dx - params.R * v + (Gamma0 * A1 / V1) * dH_dP1 + (Gamma0 * A2 / V2) * dH_dP2;

    double F = 0.0;
    switch (sc.force.kind) {
    case ForceModel::Kind::constant: F = sc.force.coefficient; break;
    case ForceModel::Kind::tanh_friction: F = sc.force.coefficient * std::tanh(v); break;
    case ForceModel::Kind::spring: F = sc.force.coefficient * x; break;
    }

    AugmentedState dy;
    dy[0] = v;
    dy[1] = drive - F;
    if (sc.mode == ControlMode::closed_loop) {
        const double kpkm = gains.k_p * gains.k_m;
        const double sig = P1 * A1 + P2 * A2 - F_hat + kpkm * (x - x_star);
        const double sig_dx = P1 * dA1 + P2 * dA2 + kpkm;
        const double coupling = 1.0 + gains.k_m * sig_dx;
        const double vd = v / gains.k_m;
        dy[2] = -coupling / (2.0 * A1) * vd - gains.k_i / A1 * sig;
        dy[3] = -coupling / (2.0 * A2) * vd - gains.k_i / A2 * sig;
    } else {
        dy[2] = -Gamma0 * A1 * v / V1;
        dy[3] = -Gamma0 * A2 * v / V2;
    }
    dy[4] = gains.alpha * (drive - F_hat + gains.alpha * p);
    return dy;
}

TrajectorySample sample_at(double t, const AugmentedState& y, double x_star, const ScenarioConfig& sc)
{
    const PlantState s = plant_part(y);
    const ObserverState obs{y[4], sc.gains.alpha};
    const Setpoint sp{x_star};

    TrajectorySample out;
    out.t = t;
    out.x = s.x;
    out.p = s.p;
    out.xdot = s.p / total_mass(s.x, sc.params);
    out.P1 = s.P1;
    out.P2 = s.P2;
    if (sc.mode == ControlMode::closed_loop) {
        const FlowPair flows = control_flows(s, obs, sc.gains, sp, sc.params);
        out.U1 = flows.U1;
        out.U2 = flows.U2;
    }
    out.F_hat = obs.F_hat;
    out.F_tilde = force_estimate(obs, s.p).F_tilde;
    out.F_true = evaluate_force(sc.force, s, sc.params);
    out.zeta = out.F_tilde - out.F_true;
    out.sigma = sigma(s, obs.F_hat, sc.gains, sp, sc.params.geometry).value;
    out.H = hamiltonian(s, sc.params);
    const DesiredEnergy energy = desired_energy(s, obs, out.F_true, sc.gains, sp, sc.params);
    out.H_d = energy.H_d;
    out.Psi = energy.Psi;
    out.x_star = x_star;
    return out;
}

SimulationStatus from_ode(ode::Status s)
{
    switch (s) {
    case ode::Status::domain_exit: return SimulationStatus::domain_exit;
    case ode::Status::step_underflow: return SimulationStatus::step_underflow;
    case ode::Status::step_limit: return SimulationStatus::step_limit;
    default: return SimulationStatus::completed;
    }
}

}  // namespace

AugmentedState augmented_rates(double t, const AugmentedState& y, const ScenarioConfig& scenario)
{
    return rates_at(y, scenario.setpoint_at(t), scenario);
}

AugmentedState augmented_rates_composed(double t, const AugmentedState& y, const ScenarioConfig& scenario)
{
    const PlantState s = plant_part(y);
    const ObserverState obs{y[4], scenario.gains.alpha};
    const Setpoint sp{scenario.setpoint_at(t)};
    FlowPair flows;
    if (scenario.mode == ControlMode::closed_loop) {
        flows = control_flows(s, obs, scenario.gains, sp, scenario.params);
    }
    const double F = evaluate_force(scenario.force, s, scenario.params);
    const PlantRates r = open_loop_field(s, flows.U1, flows.U2, F, scenario.params);
    return {r.x_dot, r.p_dot, r.P1_dot, r.P2_dot, observer_rate(s, obs, scenario.params)};
}

TrajectorySample make_sample(double t, const AugmentedState& y, const ScenarioConfig& scenario)
{
    return sample_at(t, y, scenario.setpoint_at(t), scenario);
}

TrajectoryRecord simulate(const ScenarioConfig& scenario)
{
    scenario.validate();
    TrajectoryRecord record;
    record.gain_report =
        validate_gains_over_domain(scenario.params, scenario.gains, scenario.epsilon, scenario.schedule.front().x_star);

    const PlantState s0 = scenario.initial_state();
    const ObserverState obs0 = scenario.initial_observer();
    AugmentedState y{s0.x, s0.p, s0.P1, s0.P2, obs0.F_hat};

    const double interval = scenario.solver.output_interval;
    const double end = scenario.duration;
    const auto n_out = static_cast<std::size_t>(std::floor(end / interval + 1e-9));

    ode::AdaptiveOptions adaptive;
    adaptive.rel_tol = scenario.solver.rel_tol;
    adaptive.abs_tol = scenario.solver.abs_tol;
    adaptive.max_step = scenario.solver.max_step;

    double t = 0.0;
    std::size_t next_output = 1;
    for (std::size_t seg = 0; seg < scenario.schedule.size(); ++seg) {
        const double x_star = scenario.schedule[seg].x_star;
        const double seg_end = seg + 1 < scenario.schedule.size() ? std::min(scenario.schedule[seg + 1].time, end) : end;
        if (seg_end <= t) {
            continue;
        }
        // Output times inside (t, seg_end], with seg_end itself always included.
        std::vector<double> stops;
        while (next_output <= n_out) {
            const double to = static_cast<double>(next_output) * interval;
            if (to > seg_end * (1.0 + 1e-12)) break;
            if (std::abs(to - seg_end) > 1e-9 * interval) stops.push_back(to);
            ++next_output;
        }
        stops.push_back(seg_end);

        const auto rhs = [&](double, const AugmentedState& state) { return rates_at(state, x_star, scenario); };
        const auto observe = [&](double tt, const AugmentedState& state) {
            if (!record.samples.empty() && tt <= record.samples.back().t) {
                return true;
            }
            record.samples.push_back(sample_at(tt, state, x_star, scenario));
            return true;
        };

        ode::Result<5> res;
        if (scenario.solver.method == SolverMethod::rk23) {
            res = ode::integrate_rk23<5>(rhs, t, y, stops, adaptive, observe);
        } else {
            res = ode::integrate_rk4<5>(rhs, t, y, stops, scenario.solver.fixed_step, observe);
        }
        record.stats.accepted += res.stats.accepted;
        record.stats.rejected += res.stats.rejected;
        record.stats.rhs_evals += res.stats.rhs_evals;
        if (res.status != ode::Status::completed) {
            record.status = from_ode(res.status);
            std::ostringstream os;
            os.precision(17);
            os << res.message << " at t = " << res.t << " (last accepted state x = " << res.y[0]
               << ", p = " << res.y[1] << ", P1 = " << res.y[2] << ", P2 = " << res.y[3] << ", F_hat = " << res.y[4]
               << ")";
            record.message = os.str();
            record.offending_state = plant_part(res.y);
            return record;
        }
        t = seg_end;
        y = res.y;
        if (t >= end) {
            break;
        }
    }
    return record;
}

DiagnosticsSummary diagnostics(const TrajectoryRecord& record, const ControllerGains& gains,
                               const PlantParams& params, const DiagnosticsOptions& options)
{
    const auto& samples = record.samples;
    if (samples.empty()) {
        throw std::invalid_argument("diagnostics of an empty trajectory");
    }
    DiagnosticsSummary d;
    d.samples = samples.size();
    d.t_final = samples.back().t;
    d.status = to_string(record.status);
    d.alpha = gains.alpha;

    d.max_psi = samples.front().Psi;
    d.max_psi_increment = -std::numeric_limits<double>::infinity();
    double running_min = samples.front().Psi;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        d.max_psi = std::max(d.max_psi, b.Psi);
        if (a.x_star != b.x_star) {
            running_min = b.Psi;  // Psi is redefined by a setpoint change
            continue;
        }
        d.max_psi_increment = std::max(d.max_psi_increment, b.Psi - a.Psi);
        running_min = std::min(running_min, b.Psi);
        d.max_psi_rise = std::max(d.max_psi_rise, b.Psi - running_min);
    }
    if (samples.size() < 2) {
        d.max_psi_increment = 0.0;
    }

    // Least-squares slope of log|zeta| over the leading run above the floor.
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples) {
        if (!(std::abs(s.zeta) > options.zeta_floor)) break;
        const double ly = std::log(std::abs(s.zeta));
        st += s.t;
        sy += ly;
        stt += s.t * s.t;
        sty += s.t * ly;
        ++n;
    }
    d.zeta_fit_points = n;
    d.zeta_decay_rate = std::numeric_limits<double>::quiet_NaN();
    if (n >= 2) {
        const double nn = static_cast<double>(n);
        const double denom = nn * stt - st * st;
        if (denom > 0.0) {
            d.zeta_decay_rate = -(nn * sty - st * sy) / denom;
        }
    }

    const auto& last = samples.back();
    d.x_star = last.x_star;
    d.final_position_error = last.x - last.x_star;
    d.final_momentum = last.p;
    d.final_sigma = last.sigma;
    const GradientPair grad = volume_gradients(last.x, params.geometry);
    d.final_pressure_balance = last.P1 * grad.A1 + last.P2 * grad.A2 - last.F_hat;
    d.final_F_tilde = last.F_tilde;
    d.final_F_true = last.F_true;

    // Settling relative to the last setpoint step.
    std::size_t start = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].x_star != samples[i - 1].x_star) start = i;
    }
    const double step = std::abs(last.x_star - samples[start].x);
    const double band = options.settle_band * (step > 0.0 ? step : std::max(std::abs(last.x_star), 1e-6));
    d.settle_time = samples[start].t;
    for (std::size_t i = start; i < samples.size(); ++i) {
        if (std::abs(samples[i].x - last.x_star) > band) {
            d.settle_time = i + 1 < samples.size() ? samples[i + 1].t : samples[i].t;
        }
    }
    d.settled = std::abs(last.x - last.x_star) <= band;

    double previous = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const GradientPair g = volume_gradients(samples[i].x, params.geometry);
        const double balance = g.A1 + g.A2;
        if (balance == 0.0) {
            ++d.symmetric_touches;
        } else if (i > 0 && previous != 0.0 && (balance > 0.0) != (previous > 0.0)) {
            ++d.symmetric_crossings;
        }
        previous = balance;
    }
    return d;
}

}  // namespace antago
