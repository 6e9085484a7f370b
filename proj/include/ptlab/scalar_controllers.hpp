#pragma once

#include "ptlab/scaling.hpp"
#include "ptlab/signals.hpp"
#include "ptlab/sim_engine.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptlab {

enum class SignKnowledge { positive, negative, unknown };

/**
 * Scalar plant x' = b(x,t) u + f(x,t).
 *
 * b and f are the true (hidden) plant; controllers only read psi,
 * psi_bar, b_sign and b_lower. psi_bar is the factor with
 * psi(x) = psi_bar(x) * x and is required by the adaptive laws.
 */
struct ScalarPlant {
    std::function<double(double, double)> b;
    std::function<double(double, double)> f;
    std::function<double(double)> psi;
    std::function<double(double)> psi_bar;
    SignKnowledge b_sign = SignKnowledge::positive;
    std::optional<double> b_lower;
};

/// Violations of psi(x) == psi_bar(x) * x (tolerance 1e-9 (1 + |psi|)) and psi(0) == 0.
std::vector<std::string> check_envelope_factorization(const ScalarPlant& plant,
                                                      const std::vector<double>& samples);

/// Adaptive estimates. Unused entries stay at their initial value.
struct AdaptiveState {
    double theta_hat = 0.0;
    double rho_hat = 1.0;
    double delta_hat = 0.0;
    double xi = 0.5;
};

struct AdaptiveGains {
    double k = 2.0;
    double gamma_theta = 1.0;
    double gamma_rho = 1.0;
    double gamma_delta = 1.0;
};

struct AdaptiveOutput {
    double u = 0.0;
    double u_bar = 0.0;
    AdaptiveState rates; ///< time derivatives of each estimate
};

/// Robust law u = -k z - theta z (psi(x) + |z|/T)^2 with z = mu(t) x.
double robust_pt(double x, double t, double k, double theta, const ScalarPlant& plant,
                 const TimeHorizon& h);

/**
 * Adaptive law for a constant unknown parameter and known sign of b:
 *   u_bar = -(k a'(t) x + theta_hat^2 x / 2 + psi_bar^2 x / 2),  u = rho_hat u_bar
 *   theta_hat' = gamma_theta x psi(x),  rho_hat' = -gamma_rho sgn(b) x u_bar
 * Throws ValidationError when b_sign is unknown.
 */
AdaptiveOutput adaptive_pt_ti(double x, double t, const AdaptiveState& state, const AdaptiveGains& gains,
                              const ScalarPlant& plant, const TimeHorizon& h);

/// As adaptive_pt_ti plus the compensation v = delta_hat x (1 + psi_bar^2) / 2
/// and delta_hat' = gamma_delta x^2 (1 + psi_bar^2) / 2.
AdaptiveOutput adaptive_pt_tv(double x, double t, const AdaptiveState& state, const AdaptiveGains& gains,
                              const ScalarPlant& plant, const TimeHorizon& h);

using NussbaumFunction = std::function<double(double)>;

/// N(xi) = exp(xi^2) cos(pi xi / 2).
double nussbaum_default(double xi);

/**
 * Nussbaum-gain law for unknown sign and magnitude of b:
 *   u_bar = k a'(t) x + (1 + theta_hat^2 psi_bar^2 + delta_hat (1 + psi_bar^2)) x / 2
 *   u = N(xi) u_bar,  xi' = x u_bar,  delta_hat' = gamma_delta x^2 (1 + psi_bar^2),
 *   theta_hat' = gamma_theta x psi(x)
 * Throws NumericError when N(xi) is not finite.
 */
AdaptiveOutput nussbaum_pt(double x, double t, const AdaptiveState& state, const AdaptiveGains& gains,
                           const NussbaumFunction& N, const ScalarPlant& plant, const TimeHorizon& h);

/// Initial-condition requirements of the adaptive laws:
/// rho_hat(0) sign matches b, k > 1/(|rho_hat(0)| b_lower), theta_hat(0), delta_hat(0) >= 0,
/// xi(0) > 0 for the Nussbaum law.
enum class ScalarControllerKind { robust, adaptive_ti, adaptive_tv, nussbaum };

std::string_view to_string(ScalarControllerKind k);
ScalarControllerKind parse_scalar_controller(std::string_view name);

std::vector<std::string> check_adaptive_preconditions(ScalarControllerKind kind, const AdaptiveGains& gains,
                                                      const AdaptiveState& initial, const ScalarPlant& plant);

struct ScalarScenario {
    ScalarControllerKind kind = ScalarControllerKind::robust;
    double k = 1.0;
    double theta = 1.0; ///< robust law only
    AdaptiveGains gains;
    AdaptiveState initial;
    NussbaumFunction nussbaum = nussbaum_default;
    double x0 = 1.0;
    double dt = 1e-5;
};

/**
 * Closed-loop run over [0, T - eps]. The state vector is x followed by
 * the estimates the controller uses (theta_hat, rho_hat, delta_hat, xi as
 * applicable); the control u is recorded on the grid. Runtime contract
 * checks (xi' >= 0, sgn(b) rho_hat' >= 0) that fail are recorded as
 * hypothesis_warning events.
 */
Trajectory simulate_scalar(const ScalarScenario& scenario, const ScalarPlant& plant, const TimeHorizon& h);

/// Names of the estimate columns simulate_scalar records for a kind.
std::vector<std::string> estimate_names(ScalarControllerKind kind);

} // namespace ptlab
