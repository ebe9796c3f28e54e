#pragma once

#include <stdexcept>
#include <string>

namespace antago {

/// Raised when a state or argument leaves the admissible region of the model.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a parameter set violates one of its invariants.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Geometry of one bellow actuator of the antagonistic pair (both actuators
 * are identical). All lengths in metres, volumes in cubic metres.
 *
 * The volume scale K0 = k0 * (L0^2 / n_L) * (d_c / 3 + D_s / 2) is stored
 * next to k0; validate() checks that the two agree.
 */
struct ActuatorGeometry {
    double L0 = 0.0;   // length of the empty actuator
    int n_L = 1;       // pouch count
    double D_s = 0.0;
    double d_c = 0.0;
    double k0 = 0.0;   // dimensionless scaling factor
    double K0 = 0.0;   // combined volume scale
    double V0 = 0.0;   // dead volume
    double x0 = 0.0;   // initial offset contraction
    double x_M = 0.0;  // maximum contraction
    /// States closer than this to the square-root boundary are rejected.
    double domain_margin = 1e-6;

    /// (L0^2 / n_L) * (d_c / 3 + D_s / 2), the factor multiplying k0.
    [[nodiscard]] double shape_factor() const;

    [[nodiscard]] static ActuatorGeometry from_scaling_factor(
        double L0, int n_L, double D_s, double d_c, double k0, double V0, double x0, double x_M);
    [[nodiscard]] static ActuatorGeometry from_volume_scale(
        double L0, int n_L, double D_s, double d_c, double K0, double V0, double x0, double x_M);

    /// Open interval of admissible payload positions, (-x0, x_M - x0).
    [[nodiscard]] double lower_bound() const { return -x0; }
    [[nodiscard]] double upper_bound() const { return x_M - x0; }
    [[nodiscard]] double midpoint() const { return 0.5 * (lower_bound() + upper_bound()); }

    /// True when x is inside the domain shrunk by domain_margin on both sides.
    [[nodiscard]] bool admits(double x) const;

    void validate() const;
};

struct FluidParams {
    double Gamma0 = 0.0;  // isothermal bulk modulus [Pa]
    double rho = 0.0;     // density [kg/m^3]
    double P_atm = 1e5;   // reference only; all pressures are gauge

    void validate() const;
};

struct PlantParams {
    ActuatorGeometry geometry;
    FluidParams fluid;
    double m = 0.0;  // payload mass [kg]
    double R = 0.0;  // transmission damping [N s/m]

    void validate() const;

    /// Parameter set of the reference simulation study (SI units).
    [[nodiscard]] static PlantParams reference();
};

/// Port-Hamiltonian state. Pressures are gauge.
struct PlantState {
    double x = 0.0;   // payload position [m]
    double p = 0.0;   // momentum [kg m/s]
    double P1 = 0.0;  // [Pa]
    double P2 = 0.0;  // [Pa]

    bool operator==(const PlantState&) const = default;
};

struct PlantRates {
    double x_dot = 0.0;
    double p_dot = 0.0;
    double P1_dot = 0.0;
    double P2_dot = 0.0;
};

struct VolumePair {
    double V1 = 0.0;
    double V2 = 0.0;
};

struct GradientPair {
    double A1 = 0.0;  // dV1/dx, negative in the domain
    double A2 = 0.0;  // dV2/dx, positive in the domain
};

struct CurvaturePair {
    double dA1 = 0.0;
    double dA2 = 0.0;
};

/// Volumes and their first two x-derivatives at one position.
struct VolumeTerms {
    VolumePair volume;
    GradientPair gradient;
    CurvaturePair curvature;
};

struct HamiltonianGradient {
    double d_x = 0.0;
    double d_p = 0.0;
    double d_P1 = 0.0;
    double d_P2 = 0.0;
};

// Single-pouch relations in the half central angle theta, 0 <= theta < pi.
[[nodiscard]] double pouch_length(double theta, const ActuatorGeometry& geometry);
[[nodiscard]] double pouch_volume(double theta, const ActuatorGeometry& geometry);

// Closed-form small-angle volume of one actuator as a function of its
// contraction s > 0, with its first and second derivatives in s.
[[nodiscard]] double actuator_volume(double contraction, const ActuatorGeometry& geometry);
[[nodiscard]] double actuator_volume_slope(double contraction, const ActuatorGeometry& geometry);
[[nodiscard]] double actuator_volume_curvature(double contraction, const ActuatorGeometry& geometry);

[[nodiscard]] VolumePair volumes(double x, const ActuatorGeometry& geometry);
[[nodiscard]] GradientPair volume_gradients(double x, const ActuatorGeometry& geometry);
[[nodiscard]] CurvaturePair volume_curvatures(double x, const ActuatorGeometry& geometry);
[[nodiscard]] VolumeTerms volume_terms(double x, const ActuatorGeometry& geometry);

/// M = m + (V1 + V2) rho.
[[nodiscard]] double total_mass(double x, const PlantParams& params);

/// e^u - 1 - u without cancellation for small |u|.
[[nodiscard]] double expm1_minus_linear(double u);

/// Specific internal energy phi(P) = -P + Gamma0 (exp(P / Gamma0) - 1), per unit volume.
[[nodiscard]] double pressure_energy_density(double P, const FluidParams& fluid);

/// Internal energy of a fluid volume V at gauge pressure P.
[[nodiscard]] double fluid_energy(double P, double V, const FluidParams& fluid);

[[nodiscard]] double hamiltonian(const PlantState& state, const PlantParams& params);
[[nodiscard]] HamiltonianGradient hamiltonian_gradient(const PlantState& state, const PlantParams& params);

/// Open-loop port-Hamiltonian vector field driven by pump flows U1, U2 and the
/// external force F acting against positive x.
[[nodiscard]] PlantRates open_loop_field(const PlantState& state, double U1, double U2, double F,
                                         const PlantParams& params);

}  // namespace antago
