#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "antago/simulation_engine.hpp"

namespace antago {

/// One numeric oracle: `value` must not exceed `bound` (or must hold, for boolean checks).
struct OracleCheck {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerificationReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<OracleCheck> checks;
    std::vector<std::string> notes;

    [[nodiscard]] bool passed() const;
};

[[nodiscard]] std::string format_report(const VerificationReport& report);

/// Reference scenario: nominal plant, gains (1, 2, 10, 10), x* = 1 mm, 10 s.
[[nodiscard]] ScenarioConfig reference_scenario(const ForceModel& force, const std::string& name = {});

/// The three disturbance cases 5 tanh(xdot), 10 x and -10 x, named F1, F2, F3.
[[nodiscard]] std::vector<ScenarioConfig> reference_force_scenarios();

/// Relative difference |a - b| / max(|a|, |b|, floor).
[[nodiscard]] double relative_difference(double a, double b, double floor = 0.0);

/// Open-loop field under the control flows against the target closed loop at
/// `samples` random admissible states, gains and constant forces.
[[nodiscard]] VerificationReport verify_matching(std::uint64_t seed, int samples = 100);

/// Constant-force closed-loop runs: log-linear fit of |zeta| against alpha and
/// the closed-form decay of zeta^2 / 2.
[[nodiscard]] VerificationReport verify_observer_decay(std::uint64_t seed, int runs = 3);

/// Pointwise rate of Psi against a finite-difference directional derivative,
/// plus the Psi increments along the reference force scenarios.
[[nodiscard]] VerificationReport verify_lyapunov(std::uint64_t seed, int samples = 100);

/// Analytic gradients against central differences at `samples` random points.
[[nodiscard]] VerificationReport verify_gradients(std::uint64_t seed, int samples = 20);

/// Gain conditions for the reference parameters and the validity thresholds in alpha and epsilon.
[[nodiscard]] VerificationReport verify_gains();

[[nodiscard]] std::vector<std::string> verification_suites();

/// Dispatches by suite name; throws std::invalid_argument for an unknown name.
[[nodiscard]] VerificationReport run_verification(const std::string& suite, std::uint64_t seed);

}  // namespace antago
