#include "antago/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "antago/scenario_io.hpp"

namespace antago {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

OracleCheck upper_check(std::string name, double value, double bound, std::string detail = {})
{
    return {std::move(name), value, bound, std::isfinite(value) && value <= bound, std::move(detail)};
}

OracleCheck flag_check(std::string name, bool ok, std::string detail = {})
{
    return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok, std::move(detail)};
}

// Random admissible plant state away from the stroke ends.
PlantState random_state(Rng& rng, const PlantParams& params)
{
    const ActuatorGeometry& g = params.geometry;
    const double span = g.upper_bound() - g.lower_bound();
    PlantState s;
    s.x = uniform(rng, g.lower_bound() + 0.05 * span, g.upper_bound() - 0.05 * span);
    s.p = uniform(rng, -5e-3, 5e-3);
    s.P1 = uniform(rng, -2e5, 2e5);
    s.P2 = uniform(rng, -2e5, 2e5);
    return s;
}

ControllerGains random_gains(Rng& rng)
{
    return {uniform(rng, 0.2, 5.0), uniform(rng, 0.5, 5.0), uniform(rng, 1.0, 50.0), uniform(rng, 1.0, 19.0)};
}

std::string state_text(const PlantState& s)
{
    std::ostringstream os;
    os << "x=" << format_double(s.x) << " p=" << format_double(s.p) << " P1=" << format_double(s.P1)
       << " P2=" << format_double(s.P2);
    return os.str();
}

// Fourth-order central difference with step h.
double central_difference(const std::function<double(double)>& f, double at, double h)
{
    return (-f(at + 2.0 * h) + 8.0 * f(at + h) - 8.0 * f(at - h) + f(at - 2.0 * h)) / (12.0 * h);
}

}  // namespace

bool VerificationReport::passed() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

std::string format_report(const VerificationReport& report)
{
    std::ostringstream os;
    os << "suite " << report.suite << " (seed " << report.seed << ")\n";
    for (const auto& c : report.checks) {
        os << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name << ": " << format_double(c.value)
           << " (bound " << format_double(c.bound) << ")";
        if (!c.detail.empty()) os << "  " << c.detail;
        os << "\n";
    }
    for (const auto& n : report.notes) {
        os << "  note: " << n << "\n";
    }
    os << (report.passed() ? "PASSED" : "FAILED") << "\n";
    return os.str();
}

ScenarioConfig reference_scenario(const ForceModel& force, const std::string& name)
{
    ScenarioConfig sc;
    sc.name = name;
    sc.params = PlantParams::reference();
    sc.gains = {1.0, 2.0, 10.0, 10.0};
    sc.schedule = {{0.0, 1e-3}};
    sc.force = force;
    sc.duration = 10.0;
    return sc;
}

std::vector<ScenarioConfig> reference_force_scenarios()
{
    return {reference_scenario(ForceModel::tanh_friction(5.0), "F1"),
            reference_scenario(ForceModel::spring(10.0), "F2"),
            reference_scenario(ForceModel::spring(-10.0), "F3")};
}

double relative_difference(double a, double b, double floor)
{
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

VerificationReport verify_matching(std::uint64_t seed, int samples)
{
    VerificationReport report{"matching", seed, {}, {}};
    Rng rng(seed);
    const PlantParams params = PlantParams::reference();

    double worst[5] = {0, 0, 0, 0, 0};
    PlantState worst_state;
    double worst_overall = 0.0;
    for (int n = 0; n < samples; ++n) {
        const PlantState s = random_state(rng, params);
        const ControllerGains gains = random_gains(rng);
        const double F = uniform(rng, -1.0, 1.0);
        const ObserverState obs{uniform(rng, -1.0, 1.0), gains.alpha};
        const Setpoint sp{uniform(rng, -2e-3, 2e-3)};

        const FlowPair u = control_flows(s, obs, gains, sp, params);
        const PlantRates open = open_loop_field(s, u.U1, u.U2, F, params);
        const PlantRates closed = closed_loop_field(s, obs, F, gains, sp, params);

        // Observer row: dzeta/dt = dF_hat/dt - alpha dp/dt must equal -alpha zeta.
        const double zeta = estimation_error(obs, s.p, F);
        const double zeta_rate = observer_rate(s, obs, params) - gains.alpha * open.p_dot;

        const double r[5] = {relative_difference(open.x_dot, closed.x_dot),
                             relative_difference(open.p_dot, closed.p_dot),
                             relative_difference(open.P1_dot, closed.P1_dot),
                             relative_difference(open.P2_dot, closed.P2_dot),
                             relative_difference(zeta_rate, -gains.alpha * zeta)};
        for (int i = 0; i < 5; ++i) {
            worst[i] = std::max(worst[i], r[i]);
            if (r[i] > worst_overall) {
                worst_overall = r[i];
                worst_state = s;
            }
        }
    }
    const char* names[5] = {"x_dot", "p_dot", "P1_dot", "P2_dot", "zeta_dot"};
    for (int i = 0; i < 5; ++i) {
        report.checks.push_back(upper_check(std::string("max relative residual ") + names[i], worst[i], 1e-9));
    }
    report.notes.push_back(std::to_string(samples) + " random states; worst at " + state_text(worst_state));
    return report;
}

VerificationReport verify_observer_decay(std::uint64_t seed, int runs)
{
    VerificationReport report{"observer-decay", seed, {}, {}};
    Rng rng(seed);
    double worst_rate = 0.0;
    double worst_upsilon = 0.0;
    std::size_t fewest_points = std::numeric_limits<std::size_t>::max();
    bool all_completed = true;
    for (int n = 0; n < runs; ++n) {
        const double F0 = (rng() % 2 ? 1.0 : -1.0) * uniform(rng, 0.005, 0.02);
        ScenarioConfig sc = reference_scenario(ForceModel::constant(F0), "decay");
        sc.gains.alpha = uniform(rng, 5.0, 15.0);
        sc.duration = 2.0;
        sc.initial.F_hat = 0.0;  // zeta(0) = -F0

        const TrajectoryRecord rec = simulate(sc);
        all_completed = all_completed && rec.ok();
        const DiagnosticsSummary d = diagnostics(rec, sc.gains, sc.params);
        worst_rate = std::max(worst_rate, std::abs(d.zeta_decay_rate / sc.gains.alpha - 1.0));
        fewest_points = std::min(fewest_points, d.zeta_fit_points);

        // Upsilon = zeta^2 / 2 against its closed form Upsilon(0) exp(-2 alpha t).
        const double u0 = 0.5 * rec.samples.front().zeta * rec.samples.front().zeta;
        for (const auto& s : rec.samples) {
            if (std::abs(s.zeta) < 1e-6 * std::abs(rec.samples.front().zeta)) break;
            const double expected = u0 * std::exp(-2.0 * sc.gains.alpha * s.t);
            worst_upsilon = std::max(worst_upsilon, relative_difference(0.5 * s.zeta * s.zeta, expected));
        }
    }
    report.checks.push_back(flag_check("all runs completed", all_completed));
    report.checks.push_back(upper_check("max |fitted rate / alpha - 1|", worst_rate, 1e-2));
    report.checks.push_back(upper_check("max relative error of zeta^2/2 vs exp(-2 alpha t)", worst_upsilon, 1e-5));
    report.notes.push_back("fewest points in a decay fit: " + std::to_string(fewest_points));
    return report;
}

VerificationReport verify_lyapunov(std::uint64_t seed, int samples)
{
    VerificationReport report{"lyapunov", seed, {}, {}};
    Rng rng(seed);

    // Pointwise: the analytic rate of Psi against a directional derivative along the loop.
    double worst_rate = 0.0;
    double worst_structural = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
        ScenarioConfig sc = reference_scenario(ForceModel::constant(uniform(rng, -1.0, 1.0)));
        sc.gains = random_gains(rng);
        sc.schedule = {{0.0, uniform(rng, -2e-3, 2e-3)}};
        const PlantState s = random_state(rng, sc.params);
        const AugmentedState y{s.x, s.p, s.P1, s.P2, uniform(rng, -1.0, 1.0)};
        const AugmentedState f = augmented_rates(0.0, y, sc);
        const Setpoint sp{sc.schedule.front().x_star};
        const double F = sc.force.coefficient;

        const auto psi_along = [&](double h) {
            const PlantState moved{y[0] + h * f[0], y[1] + h * f[1], y[2] + h * f[2], y[3] + h * f[3]};
            return desired_energy(moved, {y[4] + h * f[4], sc.gains.alpha}, F, sc.gains, sp, sc.params).Psi;
        };
        const double numeric = central_difference(psi_along, 0.0, 1e-7);
        const LyapunovRate rate = lyapunov_rate(s, {y[4], sc.gains.alpha}, F, sc.gains, sp, sc.params);
        const double scale = std::max(
            {std::abs(rate.structural), std::abs(rate.observer_drift), std::abs(numeric)});
        worst_rate = std::max(worst_rate, scale == 0.0 ? 0.0 : std::abs(rate.total() - numeric) / scale);

        const StabilityReport gains = validate_gains(sc.params, sc.gains, total_mass(s.x, sc.params));
        if (gains.valid()) {
            const double psi = desired_energy(s, {y[4], sc.gains.alpha}, F, sc.gains, sp, sc.params).Psi;
            worst_structural = std::max(worst_structural, rate.structural / std::max(psi, 1e-300));
        }
    }
    report.checks.push_back(upper_check("max relative error of dPsi/dt vs finite difference", worst_rate, 1e-6));
    report.checks.push_back(upper_check("max structural rate / Psi where gains are valid",
                                        std::max(worst_structural, -1e300), 0.0));

    for (const ScenarioConfig& sc : reference_force_scenarios()) {
        const TrajectoryRecord rec = simulate(sc);
        const DiagnosticsSummary d = diagnostics(rec, sc.gains, sc.params);
        const double ratio = d.max_psi > 0.0 ? d.max_psi_increment / d.max_psi : 0.0;
        report.checks.push_back(upper_check("max Psi increment / max Psi, " + sc.name, ratio, 1e-9,
                                            "status " + d.status + ", max Psi " + format_double(d.max_psi)));
    }
    report.notes.push_back(
        "descent is proven for constant forces; the position-dependent forces 10x and -10x fall outside that case");
    return report;
}

VerificationReport verify_gradients(std::uint64_t seed, int samples)
{
    VerificationReport report{"gradients", seed, {}, {}};
    Rng rng(seed);
    const PlantParams params = PlantParams::reference();
    const ActuatorGeometry& g = params.geometry;

    double w_A = 0, w_dA = 0, w_Hx = 0, w_Hp = 0, w_HP = 0, w_sx = 0, w_sP = 0;
    for (int n = 0; n < samples; ++n) {
        const PlantState s = random_state(rng, params);
        const ControllerGains gains = random_gains(rng);
        const Setpoint sp{uniform(rng, -2e-3, 2e-3)};
        const double F_hat = uniform(rng, -1.0, 1.0);
        const double hx = 1e-6;

        const GradientPair A = volume_gradients(s.x, g);
        const CurvaturePair dA = volume_curvatures(s.x, g);
        const double fd_A1 = central_difference([&](double x) { return volumes(x, g).V1; }, s.x, hx);
        const double fd_A2 = central_difference([&](double x) { return volumes(x, g).V2; }, s.x, hx);
        w_A = std::max({w_A, relative_difference(A.A1, fd_A1), relative_difference(A.A2, fd_A2)});
        const double fd_dA1 = central_difference([&](double x) { return volume_gradients(x, g).A1; }, s.x, hx);
        const double fd_dA2 = central_difference([&](double x) { return volume_gradients(x, g).A2; }, s.x, hx);
        w_dA = std::max({w_dA, relative_difference(dA.dA1, fd_dA1), relative_difference(dA.dA2, fd_dA2)});

        const HamiltonianGradient dH = hamiltonian_gradient(s, params);
        const auto H_at = [&](PlantState t) { return hamiltonian(t, params); };
        const double fd_Hx = central_difference([&](double x) { return H_at({x, s.p, s.P1, s.P2}); }, s.x, hx);
        const double fd_Hp = central_difference([&](double p) { return H_at({s.x, p, s.P1, s.P2}); }, s.p, 1e-5);
        const double hP = 1e2;
        const double fd_H1 = central_difference([&](double P) { return H_at({s.x, s.p, P, s.P2}); }, s.P1, hP);
        const double fd_H2 = central_difference([&](double P) { return H_at({s.x, s.p, s.P1, P}); }, s.P2, hP);
        w_Hx = std::max(w_Hx, relative_difference(dH.d_x, fd_Hx));
        w_Hp = std::max(w_Hp, relative_difference(dH.d_p, fd_Hp));
        w_HP = std::max({w_HP, relative_difference(dH.d_P1, fd_H1), relative_difference(dH.d_P2, fd_H2)});

        const SigmaTerms sig = sigma(s, F_hat, gains, sp, g);
        const auto sig_at = [&](PlantState t) { return sigma(t, F_hat, gains, sp, g).value; };
        const double fd_sx = central_difference([&](double x) { return sig_at({x, s.p, s.P1, s.P2}); }, s.x, hx);
        const double fd_s1 = central_difference([&](double P) { return sig_at({s.x, s.p, P, s.P2}); }, s.P1, hP);
        const double fd_s2 = central_difference([&](double P) { return sig_at({s.x, s.p, s.P1, P}); }, s.P2, hP);
        w_sx = std::max(w_sx, relative_difference(sig.d_x, fd_sx));
        w_sP = std::max({w_sP, relative_difference(sig.d_P1, fd_s1), relative_difference(sig.d_P2, fd_s2)});
    }
    report.checks.push_back(upper_check("volume gradients A_i", w_A, 1e-6));
    report.checks.push_back(upper_check("volume curvatures dA_i/dx", w_dA, 1e-5));
    report.checks.push_back(upper_check("dH/dx", w_Hx, 1e-6));
    report.checks.push_back(upper_check("dH/dp", w_Hp, 1e-6));
    report.checks.push_back(upper_check("dH/dP_i", w_HP, 1e-6));
    report.checks.push_back(upper_check("dsigma/dx", w_sx, 1e-6));
    report.checks.push_back(upper_check("dsigma/dP_i", w_sP, 1e-6));
    report.notes.push_back(std::to_string(samples) + " random points, fourth-order central differences");
    return report;
}

VerificationReport verify_gains()
{
    VerificationReport report{"gains", 0, {}, {}};
    const PlantParams params = PlantParams::reference();
    const ControllerGains gains{1.0, 2.0, 10.0, 10.0};
    const double M = total_mass(0.0, params);
    const double R = params.R;

    const StabilityReport ref = validate_gains(params, gains, M);
    report.checks.push_back(flag_check("reference gains satisfy the constant-force condition", ref.valid()));
    report.checks.push_back(flag_check("minors, eigenvalues and scalar condition agree", ref.consistent));
    report.checks.push_back(
        upper_check("|condition_product - 49.4|", std::abs(ref.condition_product - 49.4), 0.05,
                    "condition_product " + format_double(ref.condition_product) + " at M " + format_double(M)));
    report.notes.push_back("recomputed (R - alpha M) alpha k_m = " + format_double(ref.condition_product) +
                           "; the value 80 sometimes quoted for these parameters does not follow from them");

    const DomainStabilityReport domain = validate_gains_over_domain(params, gains);
    report.checks.push_back(flag_check("reference gains valid over the whole stroke", domain.worst_case.valid(),
                                       "worst M " + format_double(domain.worst_case.M_eval)));

    // alpha: (R - alpha M) alpha k_m = 1/4 has roots alpha_-, alpha_+ inside (0, R/M).
    const double km = gains.k_m;
    const double disc = std::sqrt(R * R * km * km - M * km);
    const double alpha_hi = (R * km + disc) / (2.0 * M * km);
    const double alpha_lo = (R * km - disc) / (2.0 * M * km);
    const double rel = 1e-9;
    const auto valid_at_alpha = [&](double a) {
        ControllerGains g2 = gains;
        g2.alpha = a;
        return validate_gains(params, g2, M).valid();
    };
    const bool alpha_flip = valid_at_alpha(alpha_hi * (1 - rel)) && !valid_at_alpha(alpha_hi * (1 + rel)) &&
                            valid_at_alpha(alpha_lo * (1 + rel)) && !valid_at_alpha(alpha_lo * (1 - rel));
    report.checks.push_back(flag_check("validity flips at the alpha roots", alpha_flip,
                                       "alpha in (" + format_double(alpha_lo) + ", " + format_double(alpha_hi) +
                                           ")"));

    const auto bound_at = [&](double a) {
        ControllerGains g2 = gains;
        g2.alpha = a;
        return validate_gains(params, g2, M).alpha_below_bound;
    };
    const double bound = R / M;
    report.checks.push_back(flag_check("alpha < R/M flips at R/M", bound_at(bound * (1 - rel)) &&
                                                                       !bound_at(bound * (1 + rel)),
                                       "R/M = " + format_double(bound)));
    report.checks.push_back(flag_check("alpha_+ lies below R/M", alpha_hi < bound));

    // epsilon: (1 + epsilon k_m)^2 / 4 = (R - alpha M) alpha k_m.
    const double c = (R - gains.alpha * M) * gains.alpha;
    const double eps_star = (2.0 * std::sqrt(c * km) - 1.0) / km;
    const auto valid_at_eps = [&](double e) { return validate_gains(params, gains, M, e).valid(); };
    report.checks.push_back(flag_check("validity flips at the epsilon threshold",
                                       valid_at_eps(eps_star * (1 - rel)) && !valid_at_eps(eps_star * (1 + rel)),
                                       "epsilon* = " + format_double(eps_star)));

    // The k_m window of the epsilon condition at epsilon*: k_m sits on its edge.
    const StabilityReport edge = validate_gains(params, gains, M, eps_star);
    const double edge_gap = std::min(std::abs(edge.km_window_low - km), std::abs(edge.km_window_high - km)) / km;
    report.checks.push_back(upper_check("k_m on the window edge at epsilon*", edge_gap, 1e-9,
                                        "window [" + format_double(edge.km_window_low) + ", " +
                                            format_double(edge.km_window_high) + "]"));
    return report;
}

std::vector<std::string> verification_suites()
{
    return {"matching", "observer-decay", "lyapunov", "gradients", "gains"};
}

VerificationReport run_verification(const std::string& suite, std::uint64_t seed)
{
    if (suite == "matching") return verify_matching(seed);
    if (suite == "observer-decay") return verify_observer_decay(seed);
    if (suite == "lyapunov") return verify_lyapunov(seed);
    if (suite == "gradients") return verify_gradients(seed);
    if (suite == "gains") return verify_gains();
    throw std::invalid_argument("unknown verification suite '" + suite + "'");
}

}  // namespace antago
