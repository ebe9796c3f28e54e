#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "antago/plant_model.hpp"

using namespace antago;

namespace {

const PlantParams kRef = PlantParams::reference();
const ActuatorGeometry& kGeo = kRef.geometry;

template <class F>
double central(F&& f, double at, double h)
{
    return (-f(at + 2 * h) + 8 * f(at + h) - 8 * f(at - h) + f(at - 2 * h)) / (12 * h);
}

double rel(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

std::vector<double> random_positions(int n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    const double span = kGeo.upper_bound() - kGeo.lower_bound();
    std::uniform_real_distribution<double> d(kGeo.lower_bound() + 0.02 * span, kGeo.upper_bound() - 0.02 * span);
    std::vector<double> xs(n);
    for (auto& x : xs) x = d(rng);
    return xs;
}

}  // namespace

TEST(Geometry, ReferenceParametersAreConsistent)
{
    EXPECT_NO_THROW(kRef.validate());
    EXPECT_DOUBLE_EQ(kGeo.K0, 2.8e-6);
    EXPECT_NEAR(kGeo.k0 * kGeo.shape_factor(), kGeo.K0, 1e-18);
    EXPECT_DOUBLE_EQ(kGeo.lower_bound(), -0.00375);
    EXPECT_DOUBLE_EQ(kGeo.upper_bound(), 0.00375);
}

TEST(Geometry, ScalingFactorConstructorDerivesVolumeScale)
{
    const auto g = ActuatorGeometry::from_scaling_factor(0.03, 3, 12e-3, 9e-3, 1.05, 1e-7, 0.00375, 0.0075);
    EXPECT_NEAR(g.K0, 1.05 * (0.03 * 0.03 / 3) * (9e-3 / 3 + 12e-3 / 2), 1e-20);
    EXPECT_NEAR(g.K0, 2.835e-6, 1e-12);
}

TEST(Geometry, InconsistentScalesRejected)
{
    ActuatorGeometry g = kGeo;
    g.k0 *= 1.01;
    EXPECT_THROW(g.validate(), ParameterError);
}

TEST(Geometry, StrokeBeyondQuarterLengthRejected)
{
    ActuatorGeometry g = kGeo;
    g.x_M = 0.3 * g.L0;
    EXPECT_THROW(g.validate(), ParameterError);
}

TEST(PouchLength, Examples)
{
    EXPECT_DOUBLE_EQ(pouch_length(0.0, kGeo), 0.03);
    EXPECT_NEAR(pouch_length(std::numbers::pi / 2, kGeo), 0.03 * 2 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(pouch_length(std::numbers::pi / 6, kGeo), 0.028648, 1e-6);
    EXPECT_THROW((void)pouch_length(-0.1, kGeo), DomainError);
    EXPECT_THROW((void)pouch_length(std::numbers::pi, kGeo), DomainError);
}

TEST(PouchVolume, Examples)
{
    EXPECT_DOUBLE_EQ(pouch_volume(0.0, kGeo), 0.0);
    EXPECT_NEAR(pouch_volume(std::numbers::pi / 2, kGeo), kGeo.K0 * 2 / std::numbers::pi, 1e-18);
    EXPECT_GT(pouch_volume(0.6, kGeo), pouch_volume(0.3, kGeo));
    EXPECT_THROW((void)pouch_volume(4.0, kGeo), DomainError);
}

TEST(PouchVolume, ContinuousAtZero)
{
    EXPECT_NEAR(pouch_volume(1e-6, kGeo), kGeo.K0 * 2.0 / 3.0 * 1e-6, 1e-20);
    EXPECT_NEAR(pouch_length(1e-6, kGeo), 0.03, 1e-14);
}

TEST(PouchVolume, SmallAngleFormAgreesWithinTwoPercent)
{
    // Contraction of one pouch at half-angle theta, mapped through the closed form.
    ActuatorGeometry g = kGeo;
    g.x0 = 0.0;
    g.x_M = g.L0 / 4;
    for (double theta = 0.05; theta <= 0.6 + 1e-12; theta += 0.05) {
        const double s = g.L0 - pouch_length(theta, g);
        const double closed_form = volumes(s, g).V2 - g.V0;
        EXPECT_LT(rel(closed_form, pouch_volume(theta, g)), 0.02) << "theta " << theta;
    }
}

TEST(Volumes, HandEvaluatedPoints)
{
    const double x = kGeo.L0 / 6 - kGeo.x0;
    EXPECT_NEAR(x, 1.25e-3, 1e-15);
    EXPECT_NEAR(volumes(x, kGeo).V2, 2.8e-6 * 7.0 / 12.0 + 1e-7, 1e-18);
    const auto v = volumes(0.0, kGeo);
    EXPECT_DOUBLE_EQ(v.V1, v.V2);
    EXPECT_NEAR(v.V1, 2.8e-6 * (2.0 / 3.0 - 1.0 / 16.0) * std::sqrt(0.75) + 1e-7, 1e-18);
    EXPECT_NEAR(v.V1, 1.5651e-6, 1e-10);
}

TEST(Volumes, DomainErrorNamesActuator)
{
    try {
        (void)volumes(kGeo.upper_bound(), kGeo);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("actuator 1"), std::string::npos) << e.what();
    }
    try {
        (void)volumes(kGeo.lower_bound() - 1e-4, kGeo);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("actuator 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)volume_gradients(kGeo.lower_bound() + 0.5e-6, kGeo), DomainError);
    EXPECT_NO_THROW((void)volume_gradients(kGeo.lower_bound() + 2e-6, kGeo));
}

TEST(Volumes, BoundsThroughoutDomain)
{
    for (double x : random_positions(200, 3)) {
        const auto v = volumes(x, kGeo);
        const auto a = volume_gradients(x, kGeo);
        EXPECT_GT(v.V1, kGeo.V0);
        EXPECT_GT(v.V2, kGeo.V0);
        EXPECT_LT(a.A1, 0.0);
        EXPECT_GT(a.A2, 0.0);
    }
}

TEST(Gradients, HandEvaluatedAndSymmetric)
{
    const double x = kGeo.L0 / 6 - kGeo.x0;
    EXPECT_NEAR(volume_gradients(x, kGeo).A2, 1.25 * 2.8e-6 / 0.03, 1e-15);
    const auto a0 = volume_gradients(0.0, kGeo);
    EXPECT_DOUBLE_EQ(a0.A1, -a0.A2);
    const auto c0 = volume_curvatures(0.0, kGeo);
    EXPECT_DOUBLE_EQ(c0.dA1, c0.dA2);
}

TEST(Gradients, MatchFiniteDifferences)
{
    for (double x : random_positions(20, 11)) {
        const auto a = volume_gradients(x, kGeo);
        const auto c = volume_curvatures(x, kGeo);
        EXPECT_LT(rel(a.A1, central([](double y) { return volumes(y, kGeo).V1; }, x, 1e-8)), 1e-6);
        EXPECT_LT(rel(a.A2, central([](double y) { return volumes(y, kGeo).V2; }, x, 1e-8)), 1e-6);
        EXPECT_LT(rel(c.dA1, central([](double y) { return volume_gradients(y, kGeo).A1; }, x, 1e-7)), 1e-5);
        EXPECT_LT(rel(c.dA2, central([](double y) { return volume_gradients(y, kGeo).A2; }, x, 1e-7)), 1e-5);
    }
}

TEST(Gradients, CurvatureScalesWithVolumeScale)
{
    ActuatorGeometry g = kGeo;
    g.K0 *= 2;
    g.k0 *= 2;
    const auto c1 = volume_curvatures(4e-4, kGeo);
    const auto c2 = volume_curvatures(4e-4, g);
    EXPECT_DOUBLE_EQ(c2.dA1, 2 * c1.dA1);
    EXPECT_DOUBLE_EQ(c2.dA2, 2 * c1.dA2);
}

TEST(Gradients, VolumeTermsBundleMatchesSeparateCalls)
{
    const auto t = volume_terms(-1e-3, kGeo);
    EXPECT_DOUBLE_EQ(t.volume.V1, volumes(-1e-3, kGeo).V1);
    EXPECT_DOUBLE_EQ(t.gradient.A2, volume_gradients(-1e-3, kGeo).A2);
    EXPECT_DOUBLE_EQ(t.curvature.dA1, volume_curvatures(-1e-3, kGeo).dA1);
}

TEST(TotalMass, Examples)
{
    EXPECT_NEAR(total_mass(0.0, kRef), 0.25313, 1e-5);
    PlantParams dry = kRef;
    dry.fluid.rho = 0.0;
    EXPECT_DOUBLE_EQ(total_mass(1e-3, dry), dry.m);
    for (double x : random_positions(50, 5)) EXPECT_GT(total_mass(x, kRef), kRef.m);
}

TEST(FluidEnergy, Examples)
{
    const FluidParams& f = kRef.fluid;
    EXPECT_EQ(fluid_energy(0.0, 1e-6, f), 0.0);
    const double P = 1e5;
    const double V = 1.5e-6;
    EXPECT_LT(rel(fluid_energy(P, V, f), P * P * V / (2 * f.Gamma0)), 1e-3);
    for (double p : {-1e6, -1e3, -1.0, 1e-3, 1.0, 1e4, 3e6}) {
        EXPECT_GE(fluid_energy(p, V, f), 0.0) << p;
    }
}

TEST(FluidEnergy, NoCancellationAtSmallPressures)
{
    // phi(P) ~ P^2 / (2 Gamma0) (1 + u/3), u = P / Gamma0.
    const FluidParams& f = kRef.fluid;
    for (double P : {1.0, 1e2, 1e4, 1e5}) {
        const double u = P / f.Gamma0;
        const double expected = P * P / (2 * f.Gamma0) * (1 + u / 3 + u * u / 12);
        EXPECT_LT(rel(pressure_energy_density(P, f), expected), 1e-14) << P;
    }
    EXPECT_NEAR(expm1_minus_linear(0.2), std::expm1(0.2) - 0.2, 1e-16);
}

TEST(Hamiltonian, Examples)
{
    EXPECT_EQ(hamiltonian({0, 0, 0, 0}, kRef), 0.0);
    const PlantState s{1e-3, 0.0, 3e4, -2e4};
    const auto v = volumes(s.x, kGeo);
    EXPECT_DOUBLE_EQ(hamiltonian(s, kRef),
                     fluid_energy(s.P1, v.V1, kRef.fluid) + fluid_energy(s.P2, v.V2, kRef.fluid));
    const auto g = hamiltonian_gradient({0, 0, 0, 0}, kRef);
    EXPECT_EQ(g.d_x, 0.0);
    EXPECT_EQ(g.d_p, 0.0);
    EXPECT_EQ(g.d_P1, 0.0);
    EXPECT_EQ(g.d_P2, 0.0);
}

TEST(Hamiltonian, GradientMatchesFiniteDifferences)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> P(-2e5, 2e5);
    std::uniform_real_distribution<double> mom(-5e-3, 5e-3);
    for (double x : random_positions(20, 17)) {
        const PlantState s{x, mom(rng), P(rng), P(rng)};
        const auto g = hamiltonian_gradient(s, kRef);
        EXPECT_GE(hamiltonian(s, kRef), 0.0);
        const auto H = [&](PlantState t) { return hamiltonian(t, kRef); };
        EXPECT_LT(rel(g.d_x, central([&](double v) { return H({v, s.p, s.P1, s.P2}); }, s.x, 1e-7)), 1e-6);
        EXPECT_LT(rel(g.d_p, central([&](double v) { return H({s.x, v, s.P1, s.P2}); }, s.p, 1e-5)), 1e-6);
        EXPECT_LT(rel(g.d_P1, central([&](double v) { return H({s.x, s.p, v, s.P2}); }, s.P1, 10.0)), 1e-6);
        EXPECT_LT(rel(g.d_P2, central([&](double v) { return H({s.x, s.p, s.P1, v}); }, s.P2, 10.0)), 1e-6);
    }
}

TEST(Hamiltonian, EffectivePressureForce)
{
    const PlantState s{5e-4, 0.0, 1e5, 0.0};
    const auto v = volumes(s.x, kGeo);
    const auto a = volume_gradients(s.x, kGeo);
    const double force = kRef.fluid.Gamma0 * a.A1 / v.V1 * hamiltonian_gradient(s, kRef).d_P1;
    EXPECT_LT(rel(force, a.A1 * s.P1), 1e-3);
}

TEST(OpenLoop, ZeroStateIsEquilibrium)
{
    const auto r = open_loop_field({0, 0, 0, 0}, 0, 0, 0, kRef);
    EXPECT_EQ(r.x_dot, 0.0);
    EXPECT_EQ(r.p_dot, 0.0);
    EXPECT_EQ(r.P1_dot, 0.0);
    EXPECT_EQ(r.P2_dot, 0.0);
}

TEST(OpenLoop, FlowTrackingVolumeChangeHoldsPressure)
{
    const PlantState s{-7e-4, 2e-3, 4e4, 1e4};
    const auto a = volume_gradients(s.x, kGeo);
    const double xdot = s.p / total_mass(s.x, kRef);
    const auto r = open_loop_field(s, a.A1 * xdot, a.A2 * xdot, 0.1, kRef);
    EXPECT_NEAR(r.P1_dot, 0.0, 1e-6);
    EXPECT_NEAR(r.P2_dot, 0.0, 1e-6);
}

TEST(OpenLoop, PressureRowsMatchContinuityEquation)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> P(-1e5, 1e5);
    std::uniform_real_distribution<double> U(-1e-6, 1e-6);
    for (double x : random_positions(20, 9)) {
        const PlantState s{x, 1e-3, P(rng), P(rng)};
        const double U1 = U(rng);
        const double U2 = U(rng);
        const auto r = open_loop_field(s, U1, U2, 0.0, kRef);
        const auto v = volumes(x, kGeo);
        const auto a = volume_gradients(x, kGeo);
        const double xdot = s.p / total_mass(x, kRef);
        EXPECT_LT(rel(r.P1_dot, kRef.fluid.Gamma0 * (U1 - a.A1 * xdot) / v.V1), 1e-12);
        EXPECT_LT(rel(r.P2_dot, kRef.fluid.Gamma0 * (U2 - a.A2 * xdot) / v.V2), 1e-12);
        EXPECT_DOUBLE_EQ(r.x_dot, xdot);
    }
}

TEST(OpenLoop, LosslessFieldConservesEnergy)
{
    // dH/dt = grad H . f is zero with R = 0, U = 0, F = 0.
    PlantParams lossless = kRef;
    lossless.R = 0.0;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> P(-1e5, 1e5);
    for (double x : random_positions(20, 13)) {
        const PlantState s{x, 2e-3, P(rng), P(rng)};
        const auto g = hamiltonian_gradient(s, lossless);
        const auto r = open_loop_field(s, 0, 0, 0, lossless);
        const double power = g.d_x * r.x_dot + g.d_p * r.p_dot + g.d_P1 * r.P1_dot + g.d_P2 * r.P2_dot;
        const double scale = std::abs(g.d_x * r.x_dot) + std::abs(g.d_p * r.p_dot) + std::abs(g.d_P1 * r.P1_dot) +
                             std::abs(g.d_P2 * r.P2_dot);
        EXPECT_LT(std::abs(power), 1e-9 * scale);
    }
}

TEST(OpenLoop, DampingDissipates)
{
    const PlantState s{0.0, 3e-3, 0.0, 0.0};
    const auto g = hamiltonian_gradient(s, kRef);
    const auto r = open_loop_field(s, 0, 0, 0, kRef);
    const double power = g.d_x * r.x_dot + g.d_p * r.p_dot + g.d_P1 * r.P1_dot + g.d_P2 * r.P2_dot;
    EXPECT_NEAR(power, -kRef.R * g.d_p * g.d_p, 1e-12 * kRef.R * g.d_p * g.d_p);
}
