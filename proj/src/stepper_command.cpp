#include "antago/stepper_command.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "antago/plant_model.hpp"

namespace antago {

void StepperParams::validate() const
{
    if (!(S > 0.0 && delta_t > 0.0)) {
        throw ParameterError("stepper S and delta_t must be positive");
    }
    if (!(T_f >= delta_t)) {
        throw ParameterError("stepper T_f must be at least delta_t");
    }
}

StepperParams StepperParams::from_bore(double inner_diameter, double rate_hz, double k_U)
{
    const double radius = 0.5 * inner_diameter;
    const double dt = 1.0 / rate_hz;
    StepperParams s{std::numbers::pi * radius * radius, dt, 2.0 * dt, k_U};
    s.validate();
    return s;
}

double min_jerk_position(double t, double T_f, double x_s0, double x_s_star)
{
    if (!(t >= 0.0 && t <= T_f)) {
        std::ostringstream os;
        os << "time " << t << " s outside the trajectory [0, " << T_f << "]";
        throw DomainError(os.str());
    }
    const double tau = t / T_f;
    const double tau3 = tau * tau * tau;
    return x_s0 + (x_s_star - x_s0) * tau3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

double min_jerk_velocity(double t, double T_f, double x_s0, double x_s_star)
{
    if (!(t >= 0.0 && t <= T_f)) {
        std::ostringstream os;
        os << "time " << t << " s outside the trajectory [0, " << T_f << "]";
        throw DomainError(os.str());
    }
    const double rest = T_f - t;
    return (x_s_star - x_s0) * 30.0 * t * t * rest * rest / std::pow(T_f, 5);
}

double stepper_target(double U, const StepperParams& stepper, double x_s0, double t)
{
    stepper.validate();
    const double T_f = stepper.T_f;
    if (!(t > 0.0 && t < T_f)) {
        std::ostringstream os;
        os << "time " << t << " s outside the open interval (0, " << T_f << ")";
        throw DomainError(os.str());
    }
    const double rest = T_f - t;
    return x_s0 + U * std::pow(T_f, 5) / (30.0 * t * t * stepper.S * rest * rest);
}

double stepper_target_sampled(double U, const StepperParams& stepper, double x_s0)
{
    stepper.validate();
    return x_s0 + 32.0 * U * stepper.delta_t / (30.0 * stepper.S);
}

double stepper_target_empirical(double U, const StepperParams& stepper, double x_s0)
{
    return x_s0 + U * stepper.k_U;
}

}  // namespace antago
