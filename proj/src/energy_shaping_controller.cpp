#include "antago/energy_shaping_controller.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace antago {

namespace {

void check_alpha(const ObserverState& obs, const ControllerGains& gains)
{
    if (obs.alpha != gains.alpha) {
        throw ParameterError("observer gain differs from the controller's alpha");
    }
}

SigmaTerms sigma_from(const PlantState& state, double F_hat, const ControllerGains& gains, const Setpoint& setpoint,
                      const VolumeTerms& v)
{
    const double kpkm = gains.k_p * gains.k_m;
    SigmaTerms s;
    s.value = state.P1 * v.gradient.A1 + state.P2 * v.gradient.A2 - F_hat + kpkm * (state.x - setpoint.x_star);
    s.d_x = state.P1 * v.curvature.dA1 + state.P2 * v.curvature.dA2 + kpkm;
    s.d_P1 = v.gradient.A1;
    s.d_P2 = v.gradient.A2;
    return s;
}

// Quantities shared by every closed-loop evaluation at one state.
struct LoopTerms {
    VolumeTerms volume;
    double M = 0.0;
    SigmaTerms sig;
};

LoopTerms loop_terms(const PlantState& state, double F_hat, const ControllerGains& gains, const Setpoint& setpoint,
                     const PlantParams& params)
{
    LoopTerms t;
    t.volume = volume_terms(state.x, params.geometry);
    t.M = params.m + (t.volume.volume.V1 + t.volume.volume.V2) * params.fluid.rho;
    t.sig = sigma_from(state, F_hat, gains, setpoint, t.volume);
    return t;
}

}  // namespace

void ControllerGains::validate() const
{
    if (!(k_p > 0.0 && k_m > 0.0 && k_i > 0.0 && alpha > 0.0)) {
        throw ParameterError("controller gains k_p, k_m, k_i and alpha must all be positive");
    }
}

SigmaTerms sigma(const PlantState& state, double F_hat, const ControllerGains& gains, const Setpoint& setpoint,
                 const ActuatorGeometry& geometry)
{
    return sigma_from(state, F_hat, gains, setpoint, volume_terms(state.x, geometry));
}

InterconnectionTerms interconnection_terms(const PlantState& state, double F_hat, const ControllerGains& gains,
                                           const Setpoint& setpoint, const PlantParams& params)
{
    const LoopTerms t = loop_terms(state, F_hat, gains, setpoint, params);
    const double coupling = 1.0 + gains.k_m * t.sig.d_x;
    InterconnectionTerms S;
    S.S12 = gains.k_m;
    S.S22 = gains.k_m * params.R - gains.alpha * gains.k_m * t.M;
    S.S23 = coupling / (2.0 * t.sig.d_P1);
    S.S24 = coupling / (2.0 * t.sig.d_P2);
    S.S33 = gains.k_i / (t.sig.d_P1 * t.sig.d_P1);
    S.S44 = gains.k_i / (t.sig.d_P2 * t.sig.d_P2);
    return S;
}

FlowPair control_flows(const PlantState& state, const ObserverState& obs, const ControllerGains& gains,
                       const Setpoint& setpoint, const PlantParams& params)
{
    const LoopTerms t = loop_terms(state, obs.F_hat, gains, setpoint, params);
    const auto [V1, V2] = t.volume.volume;
    const auto [A1, A2] = t.volume.gradient;
    // Nonzero everywhere in the admissible domain; a zero here means a broken geometry.
    if (A1 == 0.0 || A2 == 0.0) {
        throw DomainError("vanishing volume gradient in control law");
    }
    const double Gamma0 = params.fluid.Gamma0;
    const double velocity = state.p / t.M;
    const double desired_velocity = state.p / (gains.k_m * t.M);
    const double coupling = 1.0 + gains.k_m * t.sig.d_x;

    FlowPair flows;
    flows.U1 = A1 * velocity -
               (V1 / Gamma0) * (coupling / (2.0 * A1) * desired_velocity + gains.k_i / A1 * t.sig.value);
    flows.U2 = A2 * velocity -
               (V2 / Gamma0) * (coupling / (2.0 * A2) * desired_velocity + gains.k_i / A2 * t.sig.value);
    return flows;
}

std::array<double, 2> closed_loop_pressure_rates(const PlantState& state, double F_hat, const ControllerGains& gains,
                                                 const Setpoint& setpoint, const PlantParams& params)
{
    const LoopTerms t = loop_terms(state, F_hat, gains, setpoint, params);
    const auto [A1, A2] = t.volume.gradient;
    const double desired_velocity = state.p / (gains.k_m * t.M);
    const double coupling = 1.0 + gains.k_m * t.sig.d_x;
    return {-coupling / (2.0 * A1) * desired_velocity - gains.k_i / A1 * t.sig.value,
            -coupling / (2.0 * A2) * desired_velocity - gains.k_i / A2 * t.sig.value};
}

PlantRates closed_loop_field(const PlantState& state, const ObserverState& obs, double true_F,
                             const ControllerGains& gains, const Setpoint& setpoint, const PlantParams& params)
{
    check_alpha(obs, gains);
    const LoopTerms t = loop_terms(state, obs.F_hat, gains, setpoint, params);
    const InterconnectionTerms S = interconnection_terms(state, obs.F_hat, gains, setpoint, params);
    const auto [A1, A2] = t.volume.gradient;
    const double Md = gains.k_m * t.M;
    const double zeta = estimation_error(obs, state.p, true_F);

    // Gradient of H_d = p^2 / (2 M_d) + k_p (x* - x)^2 / 2 + sigma^2 / 2.
    const double dMd_dx = gains.k_m * params.fluid.rho * (A1 + A2);
    const double dHd_dx = -state.p * state.p * dMd_dx / (2.0 * Md * Md) + gains.k_p * (state.x - setpoint.x_star) +
                          t.sig.value * t.sig.d_x;
    const double dHd_dp = state.p / Md;
    const double dHd_dP1 = t.sig.value * t.sig.d_P1;
    const double dHd_dP2 = t.sig.value * t.sig.d_P2;

    PlantRates rates;
    rates.x_dot = S.S12 * dHd_dp;
    rates.p_dot = -S.S12 * dHd_dx - S.S22 * dHd_dp + S.S23 * dHd_dP1 + S.S24 * dHd_dP2 + zeta;
    rates.P1_dot = -S.S23 * dHd_dp - S.S33 * dHd_dP1;
    rates.P2_dot = -S.S24 * dHd_dp - S.S44 * dHd_dP2;
    return rates;
}

DesiredEnergy desired_energy(const PlantState& state, const ObserverState& obs, double true_F,
                             const ControllerGains& gains, const Setpoint& setpoint, const PlantParams& params)
{
    const LoopTerms t = loop_terms(state, obs.F_hat, gains, setpoint, params);
    const double Md = gains.k_m * t.M;
    const double error = setpoint.x_star - state.x;
    const double zeta = estimation_error(obs, state.p, true_F);
    DesiredEnergy e;
    e.H_d = 0.5 * state.p * state.p / Md + 0.5 * gains.k_p * error * error + 0.5 * t.sig.value * t.sig.value;
    e.Psi = e.H_d + 0.5 * zeta * zeta;
    return e;
}

LyapunovRate lyapunov_rate(const PlantState& state, const ObserverState& obs, double true_F,
                           const ControllerGains& gains, const Setpoint& setpoint, const PlantParams& params)
{
    check_alpha(obs, gains);
    const LoopTerms t = loop_terms(state, obs.F_hat, gains, setpoint, params);
    const double S22 = gains.k_m * (params.R - gains.alpha * t.M);
    const double dHd_dp = state.p / (gains.k_m * t.M);
    const double zeta = estimation_error(obs, state.p, true_F);
    const double sig = t.sig.value;

    LyapunovRate rate;
    rate.structural = -S22 * dHd_dp * dHd_dp + dHd_dp * zeta - gains.alpha * zeta * zeta - 2.0 * gains.k_i * sig * sig;
    rate.observer_drift = -sig * observer_rate(state, obs, params);
    return rate;
}

StabilityReport validate_gains(const ControllerGains& gains, double R, double M_eval, double epsilon)
{
    if (!(M_eval > 0.0)) {
        throw ParameterError("mass used for gain validation must be positive");
    }
    if (!(epsilon >= 0.0)) {
        throw ParameterError("force-variation bound epsilon must be non-negative");
    }
    const double km = gains.k_m;
    const double alpha = gains.alpha;
    const double M = M_eval;

    StabilityReport r;
    r.M_eval = M;
    r.epsilon = epsilon;
    r.gains_positive = gains.k_p > 0.0 && km > 0.0 && gains.k_i > 0.0 && alpha > 0.0;

    const double off = 1.0 / (2.0 * km * M) + epsilon / (2.0 * M);
    r.theta = {{{(R - alpha * M) / (km * M * M), off, 0.0}, {off, alpha, 0.0}, {0.0, 0.0, 2.0 * gains.k_i}}};

    const auto& th = r.theta;
    const double minor1 = th[0][0];
    const double minor2 = th[0][0] * th[1][1] - th[0][1] * th[1][0];
    const double minor3 = minor2 * th[2][2];
    r.positive_definite = r.gains_positive && minor1 > 0.0 && minor2 > 0.0 && minor3 > 0.0;

    Eigen::Matrix3d theta;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            theta(i, j) = th[i][j];
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(theta, Eigen::EigenvaluesOnly);
    r.margin = solver.eigenvalues().minCoeff();
    r.eigen_positive_definite = r.gains_positive && r.margin > 0.0;

    const double c = (R - alpha * M) * alpha;
    r.condition_product = c * km;
    r.required_product = 0.25 * (1.0 + epsilon * km) * (1.0 + epsilon * km);
    const bool scalar = r.gains_positive && gains.k_i > 0.0 && r.condition_product > r.required_product;
    r.consistent = (scalar == r.positive_definite) && (scalar == r.eigen_positive_definite);

    r.alpha_bound = R / M;
    r.alpha_below_bound = alpha > 0.0 && alpha < r.alpha_bound;

    // epsilon^2 k^2 - 2 (2c - epsilon) k + 1 < 0 over k = k_m.
    r.window_positive = c > epsilon / 2.0;
    if (epsilon == 0.0) {
        r.km_window_exists = c > 0.0;
        r.km_window_low = r.km_window_exists ? 1.0 / (4.0 * c) : 0.0;
        r.km_window_high = r.km_window_exists ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        r.km_window_exists = c > epsilon;
        if (r.km_window_exists) {
            const double centre = (2.0 * c - epsilon) / (epsilon * epsilon);
            const double half_width = 2.0 * std::sqrt(c * (c - epsilon)) / (epsilon * epsilon);
            r.km_window_low = centre - half_width;
            r.km_window_high = centre + half_width;
        }
    }
    return r;
}

StabilityReport validate_gains(const PlantParams& params, const ControllerGains& gains, double M_eval,
                               double epsilon)
{
    return validate_gains(gains, params.R, M_eval, epsilon);
}

DomainStabilityReport validate_gains_over_domain(const PlantParams& params, const ControllerGains& gains,
                                                 double epsilon, std::optional<double> x_eval, int samples)
{
    const ActuatorGeometry& g = params.geometry;
    DomainStabilityReport out;
    out.x_eval = x_eval.value_or(g.midpoint());
    out.at_point = validate_gains(params, gains, total_mass(out.x_eval, params), epsilon);

    samples = std::max(samples, 2);
    const double lo = g.lower_bound() + 2.0 * g.domain_margin;
    const double hi = g.upper_bound() - 2.0 * g.domain_margin;
    double worst_mass = -1.0;
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double M = total_mass(x, params);
        if (M > worst_mass) {
            worst_mass = M;
            out.x_worst = x;
        }
    }
    // The condition (R - alpha M) alpha k_m decreases with M, so the heaviest point is the worst.
    out.worst_case = validate_gains(params, gains, worst_mass, epsilon);
    return out;
}

}  // namespace antago
