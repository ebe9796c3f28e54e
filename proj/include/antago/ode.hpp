#pragma once

// Explicit Runge-Kutta integrators over fixed-size state arrays.
//
// Both integrators land exactly on every requested output time (steps are
// shortened, never interpolated) and report each one to an observer. The
// right-hand side may throw DomainError for states outside its admissible
// region; the adaptive integrator treats that as a rejected trial step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "antago/plant_model.hpp"

namespace antago::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

enum class Status { completed, stopped, domain_exit, step_underflow, step_limit };

[[nodiscard]] inline std::string to_string(Status s)
{
    switch (s) {
    case Status::completed: return "completed";
    case Status::stopped: return "stopped";
    case Status::domain_exit: return "domain_exit";
    case Status::step_underflow: return "step_underflow";
    case Status::step_limit: return "step_limit";
    }
    return "unknown";
}

struct AdaptiveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 1e-2;
    double initial_step = 0.0;  // 0 selects a step from the local scale of the problem
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

template <std::size_t N>
struct Result {
    Status status = Status::completed;
    double t = 0.0;
    Vec<N> y{};
    Stats stats;
    std::string message;
};

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, const Vec<N>& k)
{
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h * k[i];
    }
    return out;
}

inline bool reached(double t, double target)
{
    return std::abs(target - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
}

}  // namespace detail

/**
 * Bogacki-Shampine 3(2) pair with first-same-as-last evaluation, the method
 * behind MATLAB's ode23. Error control uses the max norm of
 * err_i / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)).
 *
 * `observe(t, y)` is called at t0 and at each output time; returning false
 * stops the integration with Status::stopped.
 */
template <std::size_t N, class Rhs, class Observe>
Result<N> integrate_rk23(Rhs&& rhs, double t0, const Vec<N>& y0, std::span<const double> output_times,
                         const AdaptiveOptions& opts, Observe&& observe)
{
    Result<N> res;
    res.t = t0;
    res.y = y0;
    if (!observe(t0, y0)) {
        res.status = Status::stopped;
        return res;
    }
    if (output_times.empty()) {
        return res;
    }

    double t = t0;
    Vec<N> y = y0;
    Vec<N> k1;
    try {
        k1 = rhs(t, y);
    } catch (const DomainError& e) {
        res.status = Status::domain_exit;
        res.message = e.what();
        return res;
    }
    ++res.stats.rhs_evals;

    const auto scale = [&](double a, double b) {
        return opts.abs_tol + opts.rel_tol * std::max(std::abs(a), std::abs(b));
    };

    double h = opts.initial_step;
    if (h <= 0.0) {
        // Step with a third-order local error near tolerance given the initial slope.
        double d0 = 0.0;
        double d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = scale(y[i], y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(k1[i]) / sc);
        }
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, opts.max_step);
    }

    std::size_t next = 0;
    while (next < output_times.size()) {
        const double target = output_times[next];
        if (res.stats.accepted + res.stats.rejected >= opts.max_steps) {
            res.status = Status::step_limit;
            res.message = "maximum number of steps reached";
            break;
        }
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
        h = std::min(h, opts.max_step);
        const double h_natural = h;
        bool lands = false;
        if (t + h >= target || detail::reached(t + h, target)) {
            h = target - t;
            lands = true;
        }
        if (h < min_step) {
            res.status = Status::step_underflow;
            res.message = "step size underflow";
            break;
        }

        Vec<N> y_new;
        Vec<N> k4;
        double err = 0.0;
        bool domain_failure = false;
        std::string domain_message;
        try {
            const Vec<N> k2 = rhs(t + 0.5 * h, detail::axpy(y, 0.5 * h, k1));
            const Vec<N> k3 = rhs(t + 0.75 * h, detail::axpy(y, 0.75 * h, k2));
            for (std::size_t i = 0; i < N; ++i) {
                y_new[i] = y[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i]);
            }
            k4 = rhs(t + h, y_new);
            res.stats.rhs_evals += 3;
            for (std::size_t i = 0; i < N; ++i) {
                const double e =
                    h * (-5.0 / 72.0 * k1[i] + 1.0 / 12.0 * k2[i] + 1.0 / 9.0 * k3[i] - 1.0 / 8.0 * k4[i]);
                err = std::max(err, std::abs(e) / scale(y[i], y_new[i]));
            }
        } catch (const DomainError& e) {
            domain_failure = true;
            domain_message = e.what();
        }

        if (domain_failure) {
            ++res.stats.rejected;
            if (0.25 * h < min_step) {
                res.status = Status::domain_exit;
                res.message = domain_message;
                break;
            }
            h *= 0.25;
            continue;
        }
        if (!std::isfinite(err)) {
            ++res.stats.rejected;
            h *= 0.25;
            continue;
        }

        if (err <= 1.0) {
            ++res.stats.accepted;
            t = lands ? target : t + h;
            y = y_new;
            k1 = k4;
            res.t = t;
            res.y = y;
            if (lands) {
                if (!observe(t, y)) {
                    res.status = Status::stopped;
                    return res;
                }
                ++next;
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::cbrt(1.0 / err), 0.2, 5.0);
            h *= factor;
            // A step shortened to land on an output time says little about the next one.
            if (lands) {
                h = std::max(h, h_natural);
            }
        } else {
            ++res.stats.rejected;
            h *= std::clamp(0.9 * std::cbrt(1.0 / err), 0.1, 0.9);
        }
    }
    return res;
}

/// Classical fourth-order Runge-Kutta with step `step`, shortened to land on output times.
template <std::size_t N, class Rhs, class Observe>
Result<N> integrate_rk4(Rhs&& rhs, double t0, const Vec<N>& y0, std::span<const double> output_times, double step,
                        Observe&& observe)
{
    Result<N> res;
    res.t = t0;
    res.y = y0;
    if (!observe(t0, y0)) {
        res.status = Status::stopped;
        return res;
    }
    double t = t0;
    Vec<N> y = y0;
    try {
        for (const double target : output_times) {
            // Whole steps counted from the segment start so t does not accumulate rounding.
            const double start = t;
            const double span = target - start;
            auto steps = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
            steps = std::max<std::size_t>(steps, 1);
            const double h = span / static_cast<double>(steps);
            for (std::size_t n = 0; n < steps; ++n) {
                const double tn = start + static_cast<double>(n) * h;
                const Vec<N> k1 = rhs(tn, y);
                const Vec<N> k2 = rhs(tn + 0.5 * h, detail::axpy(y, 0.5 * h, k1));
                const Vec<N> k3 = rhs(tn + 0.5 * h, detail::axpy(y, 0.5 * h, k2));
                const Vec<N> k4 = rhs(tn + h, detail::axpy(y, h, k3));
                for (std::size_t i = 0; i < N; ++i) {
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                res.stats.rhs_evals += 4;
                ++res.stats.accepted;
                res.y = y;
                res.t = n + 1 == steps ? target : start + static_cast<double>(n + 1) * h;
            }
            t = target;
            if (!observe(t, y)) {
                res.status = Status::stopped;
                return res;
            }
        }
    } catch (const DomainError& e) {
        res.status = Status::domain_exit;
        res.message = e.what();
    }
    return res;
}

}  // namespace antago::ode
