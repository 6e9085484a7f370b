#pragma once

#include "ptlab/scaling.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ptlab {

using Vec = Eigen::VectorXd;

/// Right-hand side f(t, state) of an ODE.
using Dynamics = std::function<Vec(double, const Vec&)>;
/// Readout evaluated on the sample grid (controls, bound columns, ...).
using Readout = std::function<Vec(double, const Vec&)>;

enum class EventKind { cap_engaged, clamp, settled, hypothesis_warning };

std::string_view to_string(EventKind k);

struct Event {
    double time;
    EventKind kind;
    std::string detail;
};

/**
 * Sampled closed-loop run. states/controls/estimates share the grid; an
 * empty controls or estimates vector means "not recorded". Extra columns
 * are appended to the CSV after the estimates.
 */
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> controls;
    std::vector<Vec> estimates;
    std::vector<std::string> estimate_names;
    std::vector<std::pair<std::string, std::vector<double>>> extra_columns;
    std::vector<Event> events;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    void add_event(double t, EventKind kind, std::string detail = {});
};

struct Grid {
    double t_end = 1.0;
    double dt = 1e-3;
};

struct IntegrateOptions {
    /// PT horizon guard; sub-step times are clamped to T - eps.
    std::optional<TimeHorizon> guard;
    /// Leading entries of the ODE state that are plant states; the rest
    /// are recorded as estimates. 0 means the whole state is plant state.
    Eigen::Index plant_dim = 0;
    std::vector<std::string> estimate_names;
    /// Control readout recorded at each grid point (optional).
    Readout control;
};

/// Default step for a PT horizon: min(1e-3, eps / 10).
double default_dt(const TimeHorizon& h);

/**
 * Classical fixed-step RK4 from t = 0 to grid.t_end. Grid points are
 * t_k = k * dt, plus a final shorter step when t_end is not a multiple
 * of dt.
 *
 * Throws ValidationError for dt <= 0 or t_end beyond the guard's stop
 * time, NumericError when a derivative is non-finite.
 */
Trajectory integrate(const Dynamics& dynamics, const Vec& x0, const Grid& grid,
                     const IntegrateOptions& options = {});

struct SettlingReport {
    double threshold = 0.0;
    std::optional<double> settle_time;
    double max_control = 0.0;
    double terminal_norm = 0.0;
};

/// First grid time after which ||x|| stays <= threshold to the end.
SettlingReport settling(const Trajectory& traj, double threshold);

/// Index-based variant used by callers holding raw norms.
std::optional<std::size_t> settle_index(const std::vector<double>& norms, double threshold);

/**
 * Trajectory CSV: header "t,x1..xn,u1..um,<estimates>,<extras>", one row
 * per grid point (every stride-th point, always including the last), 17
 * significant digits.
 */
void write_csv(const Trajectory& traj, std::ostream& os, std::size_t stride = 1);

std::string format_double(double v);

} // namespace ptlab
