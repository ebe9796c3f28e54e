#include "antago/plant_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace antago {

namespace {

void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw ParameterError(message);
    }
}

void check_angle(double theta)
{
    if (!(theta >= 0.0 && theta < std::numbers::pi)) {
        std::ostringstream os;
        os << "half central angle " << theta << " rad outside [0, pi)";
        throw DomainError(os.str());
    }
}

// Volume of one actuator in units of K0, as a function of q = sqrt(6 s / L0):
// g = (2/3 - q^2/12) q. Derivatives are taken with respect to s.
double shape(double q) { return q * (2.0 / 3.0 - q * q / 12.0); }
double shape_slope(double q, double L0) { return (2.0 / q - 0.75 * q) / L0; }
double shape_curvature(double q, double L0) { return -3.0 * (2.0 / (q * q) + 0.75) / (L0 * L0 * q); }

double contraction_root(double contraction, const ActuatorGeometry& g)
{
    if (!(contraction > 0.0)) {
        std::ostringstream os;
        os << "actuator contraction " << contraction << " m is not positive";
        throw DomainError(os.str());
    }
    return std::sqrt(6.0 * contraction / g.L0);
}

struct Contractions {
    double s1;
    double s2;
};

// Contraction of each actuator at payload position x, with the domain guard.
Contractions contractions(double x, const ActuatorGeometry& g)
{
    const double s1 = g.x_M - x - g.x0;
    const double s2 = x + g.x0;
    const auto reject = [&](int actuator, double s) {
        std::ostringstream os;
        os.precision(17);
        os << "position x = " << x << " m leaves the domain of actuator " << actuator
           << " (contraction " << s << " m, margin " << g.domain_margin << " m)";
        throw DomainError(os.str());
    };
    if (!(s1 > g.domain_margin)) reject(1, s1);
    if (!(s2 > g.domain_margin)) reject(2, s2);
    return {s1, s2};
}

}  // namespace

double ActuatorGeometry::shape_factor() const
{
    return (L0 * L0 / static_cast<double>(n_L)) * (d_c / 3.0 + D_s / 2.0);
}

ActuatorGeometry ActuatorGeometry::from_scaling_factor(
    double L0, int n_L, double D_s, double d_c, double k0, double V0, double x0, double x_M)
{
    ActuatorGeometry g{L0, n_L, D_s, d_c, k0, 0.0, V0, x0, x_M};
    g.K0 = k0 * g.shape_factor();
    return g;
}

ActuatorGeometry ActuatorGeometry::from_volume_scale(
    double L0, int n_L, double D_s, double d_c, double K0, double V0, double x0, double x_M)
{
    ActuatorGeometry g{L0, n_L, D_s, d_c, 0.0, K0, V0, x0, x_M};
    g.k0 = K0 / g.shape_factor();
    return g;
}

bool ActuatorGeometry::admits(double x) const
{
    return (x_M - x - x0) > domain_margin && (x + x0) > domain_margin;
}

void ActuatorGeometry::validate() const
{
    require(L0 > 0.0, "L0 must be positive");
    require(n_L >= 1, "n_L must be at least 1");
    require(D_s > 0.0, "D_s must be positive");
    require(d_c > 0.0, "d_c must be positive");
    require(V0 > 0.0, "V0 must be positive");
    require(k0 > 0.0 && K0 > 0.0, "k0 and K0 must be positive");
    require(x0 > 0.0 && x0 < x_M, "x0 must satisfy 0 < x0 < x_M");
    // Beyond L0/4 the closed-form gradient can vanish inside the stroke.
    require(x_M <= L0 / 4.0 * (1.0 + 1e-12), "x_M must not exceed L0/4");
    require(domain_margin >= 0.0 && 2.0 * domain_margin < x_M, "domain_margin out of range");
    const double implied = k0 * shape_factor();
    require(std::abs(implied - K0) <= 1e-12 * std::abs(K0),
            "K0 inconsistent with k0 * (L0^2/n_L) * (d_c/3 + D_s/2)");
}

void FluidParams::validate() const
{
    require(Gamma0 > 0.0, "Gamma0 must be positive");
    require(rho >= 0.0, "rho must be non-negative");
}

void PlantParams::validate() const
{
    geometry.validate();
    fluid.validate();
    require(m > 0.0, "m must be positive");
    require(R >= 0.0, "R must be non-negative");
}

PlantParams PlantParams::reference()
{
    constexpr double L0 = 30e-3;
    PlantParams params;
    // K0 is taken as the rounded 2.8e-6 quoted with the parameter list; k0 follows.
    params.geometry = ActuatorGeometry::from_volume_scale(L0, 3, 12e-3, 9e-3, 2.8e-6, 1e-7, L0 / 8.0, L0 / 4.0);
    params.fluid = FluidParams{2e9, 1e3, 1e5};
    params.m = 0.25;
    params.R = 5.0;
    return params;
}

double pouch_length(double theta, const ActuatorGeometry& geometry)
{
    check_angle(theta);
    if (theta == 0.0) {
        return geometry.L0;
    }
    return geometry.L0 * std::sin(theta) / theta;
}

double pouch_volume(double theta, const ActuatorGeometry& geometry)
{
    check_angle(theta);
    const double scale = geometry.k0 * geometry.shape_factor();
    if (theta < 1e-4) {
        // (theta - cos sin) / theta^2 = 2 theta/3 - 2 theta^3/15 + O(theta^5)
        return scale * theta * (2.0 / 3.0 - 2.0 * theta * theta / 15.0);
    }
    return scale * (theta - std::cos(theta) * std::sin(theta)) / (theta * theta);
}

double actuator_volume(double contraction, const ActuatorGeometry& geometry)
{
    const double q = contraction_root(contraction, geometry);
    return geometry.K0 * shape(q) + geometry.V0;
}

double actuator_volume_slope(double contraction, const ActuatorGeometry& geometry)
{
    const double q = contraction_root(contraction, geometry);
    return geometry.K0 * shape_slope(q, geometry.L0);
}

double actuator_volume_curvature(double contraction, const ActuatorGeometry& geometry)
{
    const double q = contraction_root(contraction, geometry);
    return geometry.K0 * shape_curvature(q, geometry.L0);
}

VolumePair volumes(double x, const ActuatorGeometry& geometry)
{
    const auto [s1, s2] = contractions(x, geometry);
    return {actuator_volume(s1, geometry), actuator_volume(s2, geometry)};
}

GradientPair volume_gradients(double x, const ActuatorGeometry& geometry)
{
    const auto [s1, s2] = contractions(x, geometry);
    // s1 decreases with x, hence the sign flip on actuator 1.
    return {-actuator_volume_slope(s1, geometry), actuator_volume_slope(s2, geometry)};
}

CurvaturePair volume_curvatures(double x, const ActuatorGeometry& geometry)
{
    const auto [s1, s2] = contractions(x, geometry);
    return {actuator_volume_curvature(s1, geometry), actuator_volume_curvature(s2, geometry)};
}

VolumeTerms volume_terms(double x, const ActuatorGeometry& geometry)
{
    const auto [s1, s2] = contractions(x, geometry);
    const double q1 = std::sqrt(6.0 * s1 / geometry.L0);
    const double q2 = std::sqrt(6.0 * s2 / geometry.L0);
    const double K0 = geometry.K0;
    const double L0 = geometry.L0;
    VolumeTerms terms;
    terms.volume = {K0 * shape(q1) + geometry.V0, K0 * shape(q2) + geometry.V0};
    terms.gradient = {-K0 * shape_slope(q1, L0), K0 * shape_slope(q2, L0)};
    terms.curvature = {K0 * shape_curvature(q1, L0), K0 * shape_curvature(q2, L0)};
    return terms;
}

double total_mass(double x, const PlantParams& params)
{
    const auto [V1, V2] = volumes(x, params.geometry);
    return params.m + (V1 + V2) * params.fluid.rho;
}

double expm1_minus_linear(double u)
{
    if (std::abs(u) < 0.1) {
        // Taylor series from u^2/2 through u^11/11!, truncation below 1e-16 relative.
        double term = 1.0 / 39916800.0;
        double sum = term;
        for (int k = 10; k >= 2; --k) {
            term *= static_cast<double>(k + 1);
            sum = sum * u + term;
        }
        return sum * u * u;
    }
    return std::expm1(u) - u;
}

double pressure_energy_density(double P, const FluidParams& fluid)
{
    return fluid.Gamma0 * expm1_minus_linear(P / fluid.Gamma0);
}

double fluid_energy(double P, double V, const FluidParams& fluid)
{
    return pressure_energy_density(P, fluid) * V;
}

double hamiltonian(const PlantState& state, const PlantParams& params)
{
    const auto [V1, V2] = volumes(state.x, params.geometry);
    const double M = params.m + (V1 + V2) * params.fluid.rho;
    return state.p * state.p / (2.0 * M) + fluid_energy(state.P1, V1, params.fluid) +
           fluid_energy(state.P2, V2, params.fluid);
}

HamiltonianGradient hamiltonian_gradient(const PlantState& state, const PlantParams& params)
{
    const VolumeTerms terms = volume_terms(state.x, params.geometry);
    const auto [V1, V2] = terms.volume;
    const auto [A1, A2] = terms.gradient;
    const FluidParams& fluid = params.fluid;
    const double M = params.m + (V1 + V2) * fluid.rho;

    HamiltonianGradient grad;
    grad.d_p = state.p / M;
    grad.d_P1 = V1 * std::expm1(state.P1 / fluid.Gamma0);
    grad.d_P2 = V2 * std::expm1(state.P2 / fluid.Gamma0);
    grad.d_x = -state.p * state.p * fluid.rho * (A1 + A2) / (2.0 * M * M) +
               pressure_energy_density(state.P1, fluid) * A1 + pressure_energy_density(state.P2, fluid) * A2;
    return grad;
}

PlantRates open_loop_field(const PlantState& state, double U1, double U2, double F, const PlantParams& params)
{
    const VolumeTerms terms = volume_terms(state.x, params.geometry);
    const auto [V1, V2] = terms.volume;
    const auto [A1, A2] = terms.gradient;
    const double Gamma0 = params.fluid.Gamma0;
    const HamiltonianGradient grad = hamiltonian_gradient(state, params);

    const double Gamma01 = Gamma0 * A1 / V1;
    const double Gamma02 = Gamma0 * A2 / V2;

    PlantRates rates;
    rates.x_dot = grad.d_p;
    rates.p_dot = -grad.d_x - params.R * grad.d_p + Gamma01 * grad.d_P1 + Gamma02 * grad.d_P2 - F;
    rates.P1_dot = -Gamma01 * grad.d_p + Gamma0 * U1 / V1;
    rates.P2_dot = -Gamma02 * grad.d_p + Gamma0 * U2 / V2;
    return rates;
}

}  // namespace antago
