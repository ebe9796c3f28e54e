#pragma once

namespace antago {

/// Syringe pump driven by a stepper motor through a lead screw.
struct StepperParams {
    double S = 0.0;        // syringe cross-section [m^2]
    double delta_t = 0.0;  // sampling interval [s]
    double T_f = 0.0;      // minimum-jerk segment duration [s]
    double k_U = 0.0;      // empirical flow-to-target scale

    void validate() const;

    /// Syringe of the given inner diameter sampled at `rate_hz`, with T_f = 2 delta_t.
    [[nodiscard]] static StepperParams from_bore(double inner_diameter, double rate_hz, double k_U = 0.0);
};

// Quintic minimum-jerk profile from x_s0 to x_s_star over [0, T_f].
[[nodiscard]] double min_jerk_position(double t, double T_f, double x_s0, double x_s_star);
[[nodiscard]] double min_jerk_velocity(double t, double T_f, double x_s0, double x_s_star);

/// Final stepper position whose minimum-jerk segment delivers flow U (= S dx_s/dt) at time t, 0 < t < T_f.
[[nodiscard]] double stepper_target(double U, const StepperParams& stepper, double x_s0, double t);

/// Sampled form: evaluated at t = delta_t with T_f = 2 delta_t, x_s0 + 32 U delta_t / (30 S).
[[nodiscard]] double stepper_target_sampled(double U, const StepperParams& stepper, double x_s0);

/// Raw empirical mapping x_s0 + U k_U.
[[nodiscard]] double stepper_target_empirical(double U, const StepperParams& stepper, double x_s0);

}  // namespace antago
