#pragma once

#include "ptlab/scaling.hpp"
#include "ptlab/sim_engine.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptlab {

/// T_f = |x0|^{1-alpha} / (k (1 - alpha)) for x' = -k x^[alpha].
double ft_first_order_settling(double k, double alpha, double x0);

/// Closed-form solution of x' = -k x^[alpha]; zero after T_f.
double ft_first_order_state(double k, double alpha, double x0, double t);

/// PT gain reproducing the FT trajectory: k = 1/(1 - alpha).
double ft_equals_pt_gain(double alpha);

struct EquivalenceResult {
    double alpha = 0.0;
    double x0 = 0.0;
    double settling = 0.0; ///< T_f
    double max_gap = 0.0;  ///< max over the grid of |x_ft - x_pt|
    double tolerance = 0.0;
};

/**
 * Integrates x' = -k x^[alpha] and x' = -k_pt x / (T_f - t) with
 * k_pt = 1/(1-alpha), T = T_f, over [0, T_f - eps] on a common grid.
 * tolerance = 1e-6 + 10 dt.
 */
EquivalenceResult ft_pt_equivalence(double alpha, double x0, double k = 1.0, double dt = 1e-5);

enum class DoubleIntegratorKind { finite, fixed, predefined, prescribed };
DoubleIntegratorKind parse_double_integrator_kind(std::string_view name);
std::string_view to_string(DoubleIntegratorKind k);

struct DoubleIntegratorParams {
    double T = 1.0;  ///< prescribed
    double T1 = 0.2; ///< predefined
    double T2 = 0.8; ///< predefined
};

/// Phi(v, Ti) = (5 / (2 Ti)) exp(|v|^{2/5}) |v|^{3/5} sgn(v).
double pdt_phi(double v, double Ti);
/// dPhi/dv with |v| floored at 1e-12.
double pdt_phi_derivative(double v, double Ti);

/**
 * Control of x1' = x2, x2' = u.
 *   finite:     u = -x2^[1/3] - (x1 + 0.6 x2^[5/3])^[1/5]
 *   fixed:      s = x2 + (x2^[2] + x1 + x1^3)^[1/2],
 *               u = -((1 + 3 x1^2)/2) sgn(s) - (s + s^3)^[1/2]
 *   predefined: sigma = Phi(x1, T1) + x2,
 *               u = -dPhi(x1, T1)/dx1 x2 - Phi(sigma, T2)
 *   prescribed: mu = 1/(T - t),
 *               u = -2 mu (x2 + 3 mu x1) - 3 mu^2 x1 - 3 mu x2, and 0 for t >= T
 */
double double_integrator_controller(DoubleIntegratorKind kind, const Eigen::Vector2d& x, double t,
                                    const DoubleIntegratorParams& params = {});

/// Claimed settling bound: T, pi + pi/sqrt(2), T1 + T2, none for finite.
std::optional<double> claimed_bound(DoubleIntegratorKind kind, const DoubleIntegratorParams& params);

struct ComparisonScenario {
    DoubleIntegratorKind kind = DoubleIntegratorKind::prescribed;
    Eigen::Vector2d x0{0.2, -0.2};
    std::optional<double> horizon; ///< default: 8 s, or T - eps for prescribed
    DoubleIntegratorParams params;
    double dt = 1e-4;
    std::optional<double> stop_margin; ///< prescribed; default 1e-4 T
};

struct ComparisonRow {
    ComparisonScenario scenario;
    SettlingReport report;
    std::optional<double> bound;
    bool within_bound = false;
    std::string csv_name;
    Trajectory trajectory;
};

/// Settling threshold 1e-3 (1 + ||x0||).
double comparison_threshold(const Eigen::Vector2d& x0);

/**
 * Simulates one scenario. Prescribed runs are guarded at T - eps; a
 * horizon past that point continues with u = 0.
 */
ComparisonRow run_scenario(const ComparisonScenario& scenario);

/// Runs every scenario (in parallel when threads > 1); output order follows input order.
std::vector<ComparisonRow> run_comparison(const std::vector<ComparisonScenario>& scenarios, unsigned threads = 1);

/// kind,x1_0,x2_0,settle_time,bound,within_bound,max_u
void write_summary_csv(const std::vector<ComparisonRow>& rows, std::ostream& os);

/// Matplotlib script that plots every per-run CSV named in rows.
void write_plot_script(const std::vector<ComparisonRow>& rows, std::ostream& os);

} // namespace ptlab
