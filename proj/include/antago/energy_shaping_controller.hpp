#pragma once

#include <array>
#include <limits>
#include <optional>

#include "antago/force_observer.hpp"
#include "antago/plant_model.hpp"

namespace antago {

struct ControllerGains {
    double k_p = 1.0;    // potential stiffness [N/m]
    double k_m = 1.0;    // mass scaling, M_d = k_m M
    double k_i = 1.0;    // pressure-error gain
    double alpha = 1.0;  // observer gain [1/s]

    void validate() const;
    bool operator==(const ControllerGains&) const = default;
};

struct Setpoint {
    double x_star = 0.0;  // [m]
};

/// The shaped pressure error and its partial derivatives.
struct SigmaTerms {
    double value = 0.0;
    double d_x = 0.0;
    double d_P1 = 0.0;
    double d_P2 = 0.0;
};

struct FlowPair {
    double U1 = 0.0;  // [m^3/s]
    double U2 = 0.0;
};

/// Entries of the closed-loop interconnection/damping matrix (S13 = S14 = 0).
struct InterconnectionTerms {
    double S12 = 0.0;
    double S22 = 0.0;
    double S23 = 0.0;
    double S24 = 0.0;
    double S33 = 0.0;
    double S44 = 0.0;
};

struct DesiredEnergy {
    double H_d = 0.0;
    double Psi = 0.0;  // H_d + zeta^2 / 2
};

/**
 * Time derivative of Psi along the closed loop, split in two parts.
 *
 * `structural` is the quadratic form -[p zeta sigma] Theta [p zeta sigma]^T
 * obtained with the observer state frozen inside sigma. `observer_drift` is
 * the remaining -sigma * dF_hat/dt, since sigma depends on F_hat. For a
 * constant force the true rate is their sum.
 */
struct LyapunovRate {
    double structural = 0.0;
    double observer_drift = 0.0;

    [[nodiscard]] double total() const { return structural + observer_drift; }
};

/// sigma = P1 A1 + P2 A2 - F_hat + k_p k_m (x - x*).
[[nodiscard]] SigmaTerms sigma(const PlantState& state, double F_hat, const ControllerGains& gains,
                               const Setpoint& setpoint, const ActuatorGeometry& geometry);

[[nodiscard]] InterconnectionTerms interconnection_terms(const PlantState& state, double F_hat,
                                                         const ControllerGains& gains, const Setpoint& setpoint,
                                                         const PlantParams& params);

/**
 * Pump flow commands of the energy-shaping law.
 *
 *   U_i = A_i p / M - (V_i / Gamma0) ((1 + k_m d_x sigma) / (2 A_i) p / M_d + k_i sigma / A_i)
 *
 * with M_d = k_m M. The damping-injection term uses p / M_d so that the loop
 * reproduces the interconnection terms S23, S24 exactly.
 */
[[nodiscard]] FlowPair control_flows(const PlantState& state, const ObserverState& obs,
                                     const ControllerGains& gains, const Setpoint& setpoint,
                                     const PlantParams& params);

/// Pressure rates of the closed loop after the control law is substituted; the
/// Gamma0 / V_i factor cancels, leaving a non-stiff expression.
[[nodiscard]] std::array<double, 2> closed_loop_pressure_rates(const PlantState& state, double F_hat,
                                                               const ControllerGains& gains,
                                                               const Setpoint& setpoint, const PlantParams& params);

/// Target port-Hamiltonian closed loop evaluated through H_d and the S terms.
[[nodiscard]] PlantRates closed_loop_field(const PlantState& state, const ObserverState& obs, double true_F,
                                           const ControllerGains& gains, const Setpoint& setpoint,
                                           const PlantParams& params);

[[nodiscard]] DesiredEnergy desired_energy(const PlantState& state, const ObserverState& obs, double true_F,
                                           const ControllerGains& gains, const Setpoint& setpoint,
                                           const PlantParams& params);

[[nodiscard]] LyapunovRate lyapunov_rate(const PlantState& state, const ObserverState& obs, double true_F,
                                         const ControllerGains& gains, const Setpoint& setpoint,
                                         const PlantParams& params);

struct StabilityReport {
    std::array<std::array<double, 3>, 3> theta{};  // symmetric
    double M_eval = 0.0;
    double epsilon = 0.0;
    double condition_product = 0.0;  // (R - alpha M) alpha k_m
    double required_product = 0.25;  // (1 + epsilon k_m)^2 / 4
    bool gains_positive = false;
    bool positive_definite = false;  // leading principal minors
    bool eigen_positive_definite = false;
    bool consistent = false;  // minors, eigenvalues and scalar conditions agree
    double margin = 0.0;      // smallest eigenvalue of theta
    double alpha_bound = 0.0;  // R / M
    bool alpha_below_bound = false;
    /// (R - alpha M) alpha > epsilon / 2: needed for the k_m window to lie at positive k_m.
    bool window_positive = false;
    /// Some k_m > 0 satisfies the epsilon condition, i.e. (R - alpha M) alpha > epsilon.
    bool km_window_exists = false;
    double km_window_low = 0.0;
    double km_window_high = 0.0;  // infinity when epsilon = 0

    [[nodiscard]] bool valid() const { return positive_definite; }
};

/// Gain check at a given total mass; epsilon = 0 uses the constant-force matrix.
[[nodiscard]] StabilityReport validate_gains(const ControllerGains& gains, double R, double M_eval,
                                             double epsilon = 0.0);
[[nodiscard]] StabilityReport validate_gains(const PlantParams& params, const ControllerGains& gains,
                                             double M_eval, double epsilon = 0.0);

struct DomainStabilityReport {
    StabilityReport at_point;    // evaluated at the requested position
    StabilityReport worst_case;  // largest M over the domain
    double x_eval = 0.0;
    double x_worst = 0.0;
};

/// Evaluates at x_eval (the domain midpoint when omitted) and over a uniform
/// sweep of the admissible positions.
[[nodiscard]] DomainStabilityReport validate_gains_over_domain(const PlantParams& params,
                                                               const ControllerGains& gains, double epsilon = 0.0,
                                                               std::optional<double> x_eval = std::nullopt,
                                                               int samples = 201);

}  // namespace antago
