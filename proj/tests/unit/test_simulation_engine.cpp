#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "antago/simulation_engine.hpp"
#include "antago/verification.hpp"

using namespace antago;

namespace {

double rel(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

ScenarioConfig spring(double k)
{
    return reference_scenario(ForceModel::spring(k));
}

}  // namespace

TEST(Force, Examples)
{
    const PlantParams params = PlantParams::reference();
    EXPECT_EQ(evaluate_force(ForceModel::tanh_friction(5), {0.0, 0.0, 0, 0}, params), 0.0);
    EXPECT_DOUBLE_EQ(evaluate_force(ForceModel::spring(10), {1e-3, 0.0, 0, 0}, params), 0.01);
    EXPECT_DOUBLE_EQ(evaluate_force(ForceModel::spring(-10), {1e-3, 0.0, 0, 0}, params), -0.01);
    EXPECT_DOUBLE_EQ(evaluate_force(ForceModel::constant(0.3), {1e-3, 0.02, 0, 0}, params), 0.3);
    const double M = total_mass(0.0, params);
    EXPECT_DOUBLE_EQ(evaluate_force(ForceModel::tanh_friction(5), {0.0, 0.1, 0, 0}, params), 5 * std::tanh(0.1 / M));
}

TEST(Force, KindNamesRoundTrip)
{
    for (auto k : {ForceModel::Kind::constant, ForceModel::Kind::tanh_friction, ForceModel::Kind::spring}) {
        EXPECT_EQ(parse_force_kind(to_string(k)), k);
    }
    EXPECT_THROW((void)parse_force_kind("gravity"), std::invalid_argument);
    EXPECT_EQ(parse_solver_method("rk4"), SolverMethod::rk4);
    EXPECT_THROW((void)parse_solver_method("euler"), std::invalid_argument);
    EXPECT_EQ(parse_control_mode("zero_flow"), ControlMode::zero_flow);
}

TEST(Scenario, ValidationNamesTheInvariant)
{
    ScenarioConfig sc = spring(10);
    sc.duration = 0.0;
    EXPECT_THROW(sc.validate(), ParameterError);
    sc = spring(10);
    sc.schedule = {{0.0, 0.01}};
    try {
        sc.validate();
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("x_star"), std::string::npos);
    }
    sc = spring(10);
    sc.schedule = {{0.5, 1e-3}};
    EXPECT_THROW(sc.validate(), ParameterError);
    sc = spring(10);
    sc.solver.rel_tol = 0.0;
    EXPECT_THROW(sc.validate(), ParameterError);
}

TEST(Scenario, SetpointSchedule)
{
    ScenarioConfig sc = spring(10);
    sc.schedule = {{0.0, 1e-3}, {2.0, -1e-3}, {5.0, 0.0}};
    EXPECT_EQ(sc.setpoint_at(0.0), 1e-3);
    EXPECT_EQ(sc.setpoint_at(1.999), 1e-3);
    EXPECT_EQ(sc.setpoint_at(2.0), -1e-3);
    EXPECT_EQ(sc.setpoint_at(9.0), 0.0);
}

TEST(Scenario, InitialObserverIsUnbiasedByDefault)
{
    ScenarioConfig sc = spring(10);
    sc.initial.xdot = 0.01;
    const PlantState s = sc.initial_state();
    EXPECT_DOUBLE_EQ(s.p, total_mass(0.0, sc.params) * 0.01);
    EXPECT_NEAR(force_estimate(sc.initial_observer(), s.p).F_tilde, 0.0, 1e-18);
    sc.initial.F_hat = 0.4;
    EXPECT_EQ(sc.initial_observer().F_hat, 0.4);
}

TEST(Rates, FusedFieldMatchesComposedField)
{
    std::mt19937_64 rng(31);
    const auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (const auto& force : {ForceModel::constant(0.2), ForceModel::tanh_friction(5), ForceModel::spring(-10)}) {
        ScenarioConfig sc = reference_scenario(force);
        for (int i = 0; i < 30; ++i) {
            const AugmentedState y{u(-3e-3, 3e-3), u(-5e-3, 5e-3), u(-2e5, 2e5), u(-2e5, 2e5), u(-1, 1)};
            const auto a = augmented_rates(0.0, y, sc);
            const auto b = augmented_rates_composed(0.0, y, sc);
            for (int k = 0; k < 5; ++k) EXPECT_LT(rel(a[k], b[k]), 1e-9) << k;
        }
    }
}

TEST(Rates, ZeroFlowModeHoldsPumpsClosed)
{
    ScenarioConfig sc = spring(0);
    sc.mode = ControlMode::zero_flow;
    const AugmentedState y{1e-3, 2e-3, 1e4, -2e4, 0.0};
    const auto a = augmented_rates(0.0, y, sc);
    const auto b = augmented_rates_composed(0.0, y, sc);
    for (int k = 0; k < 5; ++k) EXPECT_LT(rel(a[k], b[k]), 1e-12) << k;
}

TEST(Simulate, EquilibriumStaysPut)
{
    ScenarioConfig sc = reference_scenario(ForceModel::constant(0.0));
    sc.initial.x = 1e-3;
    sc.duration = 2.0;
    const auto rec = simulate(sc);
    ASSERT_TRUE(rec.ok());
    for (const auto& s : rec.samples) {
        EXPECT_LT(std::abs(s.x - 1e-3), 1e-10);
        EXPECT_LT(std::abs(s.p), 1e-10);
    }
}

TEST(Simulate, ReferenceCasesConverge)
{
    const double expected[] = {0.0, 0.01, -0.01};
    const auto cases = reference_force_scenarios();
    double settle[3];
    for (int i = 0; i < 3; ++i) {
        const auto rec = simulate(cases[i]);
        ASSERT_TRUE(rec.ok()) << rec.message;
        const auto d = diagnostics(rec, cases[i].gains, cases[i].params);
        EXPECT_LT(std::abs(d.final_position_error), 1e-5) << cases[i].name;
        EXPECT_NEAR(d.final_F_tilde, expected[i], 1e-3) << cases[i].name;
        EXPECT_TRUE(d.settled);
        EXPECT_DOUBLE_EQ(rec.samples.back().t, 10.0);
        settle[i] = d.settle_time;
    }
    EXPECT_LT(settle[2], settle[1]);
}

TEST(Simulate, SamplesAreStrictlyIncreasingAndInDomain)
{
    ScenarioConfig sc = spring(10);
    sc.duration = 1.0;
    sc.schedule = {{0.0, 1e-3}, {0.3333, -5e-4}};
    const auto rec = simulate(sc);
    ASSERT_TRUE(rec.ok());
    for (std::size_t i = 1; i < rec.samples.size(); ++i) {
        EXPECT_GT(rec.samples[i].t, rec.samples[i - 1].t);
        EXPECT_TRUE(sc.params.geometry.admits(rec.samples[i].x));
    }
    EXPECT_EQ(rec.samples.back().x_star, -5e-4);
}

TEST(Simulate, Deterministic)
{
    ScenarioConfig sc = spring(-10);
    sc.duration = 1.0;
    const auto a = simulate(sc);
    const auto b = simulate(sc);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i], b.samples[i]);
}

TEST(Simulate, ToleranceHalvingBarelyMovesFinalState)
{
    ScenarioConfig sc = spring(10);
    const auto a = simulate(sc);
    sc.solver.rel_tol *= 0.5;
    sc.solver.abs_tol *= 0.5;
    const auto b = simulate(sc);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_LT(rel(a.samples.back().x, b.samples.back().x), 1e-8);
}

TEST(Simulate, Rk4AgreesWithRk23)
{
    ScenarioConfig sc = reference_scenario(ForceModel::tanh_friction(5));
    sc.duration = 3.0;
    const auto a = simulate(sc);
    sc.solver.method = SolverMethod::rk4;
    sc.solver.fixed_step = 1e-4;
    const auto b = simulate(sc);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        worst = std::max(worst, std::abs(a.samples[i].x - b.samples[i].x));
        scale = std::max(scale, std::abs(a.samples[i].x));
    }
    EXPECT_LT(worst / scale, 1e-5);
}

TEST(Simulate, DomainExitReportsOffendingState)
{
    // A large unmodelled load pushes the payload against the stroke end.
    ScenarioConfig sc = reference_scenario(ForceModel::constant(0.0));
    sc.initial.F_hat = 2.0;
    sc.duration = 2.0;
    const auto rec = simulate(sc);
    EXPECT_EQ(rec.status, SimulationStatus::domain_exit);
    ASSERT_TRUE(rec.offending_state.has_value());
    EXPECT_NE(rec.message.find("last accepted state"), std::string::npos);
    EXPECT_FALSE(rec.samples.empty());
}

TEST(Simulate, LosslessZeroFlowConservesEnergy)
{
    ScenarioConfig sc = reference_scenario(ForceModel::constant(0.0));
    sc.params.R = 0.0;
    sc.mode = ControlMode::zero_flow;
    sc.solver.method = SolverMethod::rk4;
    sc.solver.fixed_step = 2.5e-7;
    sc.duration = 0.2;
    sc.schedule = {{0.0, 0.0}};
    sc.initial = {1e-3, 0.01, 2e4, -1e4, std::nullopt};
    const auto rec = simulate(sc);
    ASSERT_TRUE(rec.ok());
    const double H0 = rec.samples.front().H;
    for (const auto& s : rec.samples) EXPECT_LT(std::abs(s.H - H0), 1e-9 * H0);
}

TEST(Simulate, GainReportAttached)
{
    ScenarioConfig sc = spring(10);
    sc.duration = 0.01;
    sc.gains.alpha = 25.0;  // beyond R / M
    const auto rec = simulate(sc);
    EXPECT_FALSE(rec.gain_report.at_point.valid());
    EXPECT_DOUBLE_EQ(rec.gain_report.x_eval, 1e-3);
}

TEST(Diagnostics, EmptyRecordThrows)
{
    const TrajectoryRecord rec;
    EXPECT_THROW((void)diagnostics(rec, {1, 2, 10, 10}, PlantParams::reference()), std::invalid_argument);
}

TEST(Diagnostics, ObserverDecayFitAndDescent)
{
    ScenarioConfig sc = reference_scenario(ForceModel::constant(0.01));
    sc.initial.F_hat = 0.0;
    sc.duration = 2.0;
    const auto rec = simulate(sc);
    ASSERT_TRUE(rec.ok());
    const auto d = diagnostics(rec, sc.gains, sc.params);
    EXPECT_NEAR(d.zeta_decay_rate, sc.gains.alpha, 1e-2 * sc.gains.alpha);
    EXPECT_GT(d.zeta_fit_points, 100u);
    EXPECT_LE(d.max_psi_increment, 1e-9 * d.max_psi);
    for (const auto& s : rec.samples) {
        if (std::abs(s.zeta) < 1e-9) break;
        EXPECT_LT(rel(s.zeta, -0.01 * std::exp(-sc.gains.alpha * s.t)), 1e-3) << s.t;
    }
}

TEST(Diagnostics, EquilibriumResiduals)
{
    ScenarioConfig sc = reference_scenario(ForceModel::constant(0.01));
    sc.duration = 15.0;
    const auto rec = simulate(sc);
    const auto d = diagnostics(rec, sc.gains, sc.params);
    EXPECT_LT(std::abs(d.final_position_error), 1e-6);
    EXPECT_LT(std::abs(d.final_sigma), 1e-6);
    EXPECT_LT(std::abs(d.final_pressure_balance), 1e-3 * std::max(1.0, std::abs(rec.samples.back().F_hat)));
    EXPECT_NEAR(d.final_F_tilde, 0.01, 1e-5);
}

TEST(Diagnostics, SymmetricConfigurationIsReported)
{
    ScenarioConfig sc = spring(10);
    sc.duration = 0.5;
    const auto rec = simulate(sc);
    const auto d = diagnostics(rec, sc.gains, sc.params);
    // The run starts exactly at x = 0, where A1 = -A2.
    EXPECT_GE(d.symmetric_touches, 1u);
}
