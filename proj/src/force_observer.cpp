#include "antago/force_observer.hpp"

namespace antago {

void ObserverState::validate() const
{
    if (!(alpha > 0.0)) {
        throw ParameterError("observer gain alpha must be positive");
    }
}

ObserverState unbiased_observer(double alpha, double p0)
{
    ObserverState obs{alpha * p0, alpha};
    obs.validate();
    return obs;
}

double observer_rate(const PlantState& state, const ObserverState& obs, const PlantParams& params)
{
    const VolumeTerms terms = volume_terms(state.x, params.geometry);
    const auto [V1, V2] = terms.volume;
    const auto [A1, A2] = terms.gradient;
    const double Gamma0 = params.fluid.Gamma0;
    const HamiltonianGradient grad = hamiltonian_gradient(state, params);
    const double beta = -obs.alpha * state.p;

    // Generalized force on the payload, excluding the unknown F.
    const double drive =
        -grad.d_x - params.R * grad.d_p + (Gamma0 * A1 / V1) * grad.d_P1 + (Gamma0 * A2 / V2) * grad.d_P2;
    return obs.alpha * (drive - obs.F_hat - beta);
}

ForceEstimate force_estimate(const ObserverState& obs, double p)
{
    const double beta = -obs.alpha * p;
    return {obs.F_hat + beta, beta};
}

double estimation_error(const ObserverState& obs, double p, double true_force)
{
    return force_estimate(obs, p).F_tilde - true_force;
}

}  // namespace antago
