#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "antago/plant_model.hpp"
#include "antago/stepper_command.hpp"

using namespace antago;

namespace {
StepperParams bench()
{
    return {5.7256e-4, 0.048, 0.096, 6.0};
}
}  // namespace

TEST(MinJerk, BoundaryValuesAndMidpoint)
{
    EXPECT_DOUBLE_EQ(min_jerk_position(0.0, 2.0, 0.1, 0.5), 0.1);
    EXPECT_DOUBLE_EQ(min_jerk_position(2.0, 2.0, 0.1, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(min_jerk_position(1.0, 2.0, 0.1, 0.5), 0.3);
    EXPECT_EQ(min_jerk_velocity(0.0, 2.0, 0.1, 0.5), 0.0);
    EXPECT_EQ(min_jerk_velocity(2.0, 2.0, 0.1, 0.5), 0.0);
}

TEST(MinJerk, VelocityMatchesFiniteDifference)
{
    const double T = 0.096;
    for (double t = 0.005; t < T; t += 0.01) {
        const double h = 1e-6;
        const double fd = (min_jerk_position(t + h, T, 0.0, 1e-3) - min_jerk_position(t - h, T, 0.0, 1e-3)) / (2 * h);
        const double v = min_jerk_velocity(t, T, 0.0, 1e-3);
        EXPECT_LT(std::abs(fd - v) / std::abs(v), 1e-6) << t;
    }
}

TEST(MinJerk, OutOfRangeTime)
{
    EXPECT_THROW((void)min_jerk_position(-1e-3, 1.0, 0, 1), DomainError);
    EXPECT_THROW((void)min_jerk_position(1.001, 1.0, 0, 1), DomainError);
    EXPECT_THROW((void)min_jerk_velocity(2.0, 1.0, 0, 1), DomainError);
}

TEST(StepperTarget, ZeroFlowKeepsPosition)
{
    EXPECT_EQ(stepper_target(0.0, bench(), 0.012, 0.048), 0.012);
    EXPECT_EQ(stepper_target_sampled(0.0, bench(), 0.012), 0.012);
}

TEST(StepperTarget, WorkedValue)
{
    const double dx = stepper_target_sampled(1e-6, bench(), 0.0);
    EXPECT_NEAR(dx, 32 * 1e-6 * 0.048 / (30 * 5.7256e-4), 1e-20);
    EXPECT_NEAR(dx, 8.9423e-5, 1e-9);
}

TEST(StepperTarget, GeneralFormulaReducesToSampledForm)
{
    for (double U : {-3e-6, 1e-7, 1e-6, 4.2e-6}) {
        const StepperParams s = bench();
        const double general = stepper_target(U, s, 0.01, s.delta_t);
        const double sampled = stepper_target_sampled(U, s, 0.01);
        EXPECT_LE(std::abs(general - sampled), 4 * std::numeric_limits<double>::epsilon() * std::abs(general));
    }
}

TEST(StepperTarget, GeneralFormulaIsPeakVelocityInversion)
{
    // The target makes the syringe flow S * dx_s/dt equal U at time t.
    const StepperParams s = bench();
    const double U = 2e-6;
    const double t = 0.03;
    const double target = stepper_target(U, s, 0.0, t);
    EXPECT_NEAR(s.S * min_jerk_velocity(t, s.T_f, 0.0, target), U, 1e-18);
}

TEST(StepperTarget, RejectsEndpointsAndBadParameters)
{
    EXPECT_THROW((void)stepper_target(1e-6, bench(), 0.0, 0.0), DomainError);
    EXPECT_THROW((void)stepper_target(1e-6, bench(), 0.0, 0.096), DomainError);
    StepperParams bad = bench();
    bad.S = 0.0;
    EXPECT_THROW((void)stepper_target_sampled(1e-6, bad, 0.0), ParameterError);
}

TEST(StepperTarget, FromBoreAndEmpiricalScale)
{
    const StepperParams s = StepperParams::from_bore(0.027, 1.0 / 0.048, 6.0);
    EXPECT_NEAR(s.S, 5.7256e-4, 1e-8);
    EXPECT_NEAR(s.T_f, 2 * s.delta_t, 1e-15);
    EXPECT_DOUBLE_EQ(stepper_target_empirical(1e-6, s, 0.002), 0.002 + 6e-6);
}
