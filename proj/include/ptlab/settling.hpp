#pragma once

#include "ptlab/errors.hpp"
#include "ptlab/rng.hpp"
#include "ptlab/scaling.hpp"
#include "ptlab/signals.hpp"
#include "ptlab/sim_engine.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptlab {

/**
 * Lyapunov differential inequalities with known settling behaviour.
 * Each kind names the right-hand side of V' <= ...:
 *
 *   FT1           -k V^q
 *   FastFT2       -k1 V^p - k2 V^q
 *   SemiGlobal3   -k1 V^q + k2 V
 *   PracticalFT4  -k V^q + eta                 (residual set, uses theta)
 *   PracticalFT5  -k1 V^q - k2 V + eta         (residual set, uses theta)
 *   Fixed6        -(alpha V^p + beta V^q)^k
 *   Fixed7        -alpha V^(1-1/(2 gamma)) - beta V^(1+1/(2 gamma))
 *   Fixed8        -alpha V^(2-p/q) - beta V^(p/q)      (p, q odd)
 *   Fixed9        -k1 V^(m/n) - k2 V^(p/q)             (m, n, p, q odd)
 *   Predefined10  -(1/(p Tp)) exp(V^p) V^(1-p)
 *   PT11          -2 k mu V + mu d^2 / (4 theta)
 *   PT12          -k mu V + |d|
 */
enum class LyapunovKind {
    FT1,
    FastFT2,
    SemiGlobal3,
    PracticalFT4,
    PracticalFT5,
    Fixed6,
    Fixed7,
    Fixed8,
    Fixed9,
    Predefined10,
    PT11,
    PT12,
};

std::string_view to_string(LyapunovKind k);
LyapunovKind parse_lyapunov_kind(std::string_view name);
/// Human-readable row label, e.g. "finite-time: V' <= -k V^q".
std::string_view row_name(LyapunovKind k);
/// Coefficient names each kind requires.
const std::vector<std::string>& required_coefficients(LyapunovKind k);

struct LyapunovSpec {
    LyapunovKind kind = LyapunovKind::FT1;
    std::map<std::string, double> coefficients;
    double V0 = 1.0;

    double coef(const std::string& name) const;
};

/// Every violated range constraint; empty when the LyapunovSpec is valid.
std::vector<std::string> check(const LyapunovSpec& spec);
void validate(const LyapunovSpec& spec);

/// Thrown when a closed-form bound has no value for the parameters given.
class BoundUndefined : public Error {
public:
    using Error::Error;
};

/**
 * Closed-form settling time (exact for FT1, an upper bound otherwise).
 * PracticalFT4/5 bound the time to enter the residual set and return 0
 * when V0 already lies inside it.
 *
 * Throws ValidationError on range violations, UnsupportedError for
 * PT11/PT12 (their settling time is the user's T), BoundUndefined when
 * the formula has no real value.
 */
double settling_bound(const LyapunovSpec& spec);

/**
 * Random valid parameters for the autonomous kinds (FT1 .. Predefined10),
 * for oracle sweeps. Gains are log-uniform in [0.5, 5], exponents uniform
 * inside their admissible ranges, odd integers from {1, 3, 5, 7, 9} and V0
 * log-uniform in [0.1, 10] ([1, 100] where a branch needs V0 >= 1).
 * SemiGlobal3 draws V0 inside its region of attraction.
 */
LyapunovSpec draw_spec(LyapunovKind kind, Xorshift64& rng);

/// Residual-set level of V for PracticalFT4/5; 0 for every other kind.
double residual_level(const LyapunovSpec& spec);

/// Settling threshold used by simulate_inequality:
/// 1.1 * residual level for PracticalFT4/5, otherwise 1e-6 * max(1, V0).
double settle_threshold(const LyapunovSpec& spec);

/// Right-hand side of the equality case at (t, V). V <= 0 counts as
/// settled: the decay terms vanish there.
double inequality_rhs(const LyapunovSpec& spec, double t, double V, double d,
                      const TimeHorizon* horizon);

struct InequalityRun {
    Trajectory trajectory;         ///< V(t) as a 1-dimensional state
    double threshold = 0.0;
    std::optional<double> settle_time;   ///< stays below threshold afterwards
    std::optional<double> zero_time;     ///< first grid time with V == 0
    std::size_t clamp_count = 0;
};

struct InequalityOptions {
    std::optional<Signal> disturbance;
    std::optional<TimeHorizon> horizon;
    double dt = 1e-4;
    /// Integration end; defaults to T - eps with a horizon, otherwise
    /// max(1.25 * settling_bound, 100 dt).
    std::optional<double> t_end;
    /// Overrides settle_threshold(spec).
    std::optional<double> threshold;
};

/**
 * Integrates V' = (right-hand side of the inequality) from V0 with RK4.
 * Stage values are floored at 0 and any step that lands below zero is
 * clamped to 0 and recorded as a clamp event.
 */
InequalityRun simulate_inequality(const LyapunovSpec& spec, const InequalityOptions& options);

} // namespace ptlab
