#pragma once

#include "antago/plant_model.hpp"

namespace antago {

/// Integrator state of the immersion-and-invariance force observer.
struct ObserverState {
    double F_hat = 0.0;  // [N]
    double alpha = 1.0;  // observer gain [1/s], positive

    void validate() const;
};

struct ForceEstimate {
    double F_tilde = 0.0;  // F_hat + beta
    double beta = 0.0;     // -alpha * p
};

/// Observer state whose estimate is zero at momentum p0 (F_hat = alpha * p0).
[[nodiscard]] ObserverState unbiased_observer(double alpha, double p0);

/// dF_hat/dt. Uses only the measured plant state and the observer's own state.
[[nodiscard]] double observer_rate(const PlantState& state, const ObserverState& obs, const PlantParams& params);

[[nodiscard]] ForceEstimate force_estimate(const ObserverState& obs, double p);

/// zeta = F_hat + beta - F. Needs the true force, so only harnesses that know it call this.
[[nodiscard]] double estimation_error(const ObserverState& obs, double p, double true_force);

}  // namespace antago
