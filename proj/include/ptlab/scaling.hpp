#pragma once

#include <limits>
#include <optional>

namespace ptlab {

/**
 * Prescribed terminal time together with the singularity-handling policy.
 *
 * Simulations stop at T - stop_margin, and every time-varying gain
 * (mu and a') is saturated at mu_cap. mu_cap may be +inf to disable
 * the cap.
 */
struct TimeHorizon {
    double T = 1.0;
    double stop_margin = 1e-4;
    double mu_cap = 1e6;

    /// Validated construction; defaults are eps = 1e-4 * T and cap = 1e6.
    static TimeHorizon make(double T, std::optional<double> stop_margin = std::nullopt,
                            std::optional<double> mu_cap = std::nullopt);

    double stop_time() const noexcept { return T - stop_margin; }
    void validate() const;
};

inline constexpr double kNoCap = std::numeric_limits<double>::infinity();

/// State-scaling gain mu(t) = T/(T-t), capped. Throws DomainError outside [0, T).
double mu(double t, const TimeHorizon& h);

/// The constant mu' / mu^2 = 1/T.
double mu_dot_over_mu_sq(const TimeHorizon& h);

struct TimeScale {
    double tau;  ///< scaled time ln(T/(T-t))
    double rate; ///< a'(t) = 1/(T-t), capped
};

/// Time-scaling map tau = a(t) and its derivative. Throws DomainError outside [0, T).
TimeScale time_scale(double t, const TimeHorizon& h);

/// a'(t) alone; equals mu'(t)/mu(t).
double scale_rate(double t, const TimeHorizon& h);

/// alpha(tau) = a'(a^{-1}(tau)) = e^tau / T (uncapped).
double scale_rate_at_tau(double tau, const TimeHorizon& h);

/// True when mu(t) is saturated by the cap.
bool cap_engaged(double t, const TimeHorizon& h);

} // namespace ptlab
