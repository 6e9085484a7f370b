#include "ptlab/sim_engine.hpp"

#include "ptlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace ptlab {

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::cap_engaged: return "cap_engaged";
    case EventKind::clamp: return "clamp";
    case EventKind::settled: return "settled";
    case EventKind::hypothesis_warning: return "hypothesis_warning";
    }
    return "?";
}

void Trajectory::add_event(double t, EventKind kind, std::string detail) {
    // keep events ordered by time even when callers append late
    auto it = std::upper_bound(events.begin(), events.end(), t,
                               [](double v, const Event& e) { return v < e.time; });
    events.insert(it, Event{t, kind, std::move(detail)});
}

double default_dt(const TimeHorizon& h) { return std::min(1e-3, h.stop_margin / 10.0); }

namespace {

std::string describe_state(const Vec& x) {
    std::ostringstream os;
    os << '[';
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << ']';
    return os.str();
}

} // namespace

Trajectory integrate(const Dynamics& dynamics, const Vec& x0, const Grid& grid,
                     const IntegrateOptions& options) {
    std::vector<std::string> errs;
    if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) errs.emplace_back("integration.dt must be > 0");
    if (!(grid.t_end >= 0.0) || !std::isfinite(grid.t_end))
        errs.emplace_back("integration.t_end must be finite and >= 0");
    if (options.guard) {
        options.guard->validate();
        if (grid.t_end > options.guard->stop_time() * (1.0 + 1e-12))
            errs.emplace_back("integration.t_end exceeds T - epsilon of the attached horizon");
    }
    if (options.plant_dim < 0 || options.plant_dim > x0.size())
        errs.emplace_back("plant_dim out of range");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    const Eigen::Index plant_dim = options.plant_dim == 0 ? x0.size() : options.plant_dim;
    const Eigen::Index est_dim = x0.size() - plant_dim;
    const double stop = options.guard ? options.guard->stop_time() : grid.t_end;

    // grid
    std::vector<double> times;
    const auto n = static_cast<std::size_t>(std::floor(grid.t_end / grid.dt + 1e-9));
    times.reserve(n + 2);
    for (std::size_t k = 0; k <= n; ++k) times.push_back(std::min(static_cast<double>(k) * grid.dt, grid.t_end));
    if (grid.t_end - times.back() > 1e-9 * grid.dt) times.push_back(grid.t_end);

    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    if (est_dim > 0) {
        traj.estimates.reserve(times.size());
        traj.estimate_names = options.estimate_names;
        traj.estimate_names.resize(static_cast<std::size_t>(est_dim));
        for (Eigen::Index i = 0; i < est_dim; ++i) {
            auto& name = traj.estimate_names[static_cast<std::size_t>(i)];
            if (name.empty()) name = "est" + std::to_string(i + 1);
        }
    }

    bool cap_reported = false;
    auto eval = [&](double t, const Vec& x) -> Vec {
        const double ts = std::min(t, stop);
        if (options.guard && !cap_reported && cap_engaged(ts, *options.guard)) {
            cap_reported = true;
            traj.add_event(ts, EventKind::cap_engaged, "gain saturated at mu_cap");
        }
        Vec dx = dynamics(ts, x);
        if (dx.size() != x.size())
            throw NumericError("dynamics returned dimension " + std::to_string(dx.size()) +
                               ", expected " + std::to_string(x.size()));
        if (!dx.allFinite())
            throw NumericError("non-finite derivative at t = " + format_double(ts) +
                               ", state = " + describe_state(x));
        return dx;
    };

    auto record = [&](double t, const Vec& x) {
        traj.states.push_back(x.head(plant_dim));
        if (est_dim > 0) traj.estimates.push_back(x.tail(est_dim));
        if (options.control) traj.controls.push_back(options.control(std::min(t, stop), x));
    };

    Vec x = x0;
    record(times.front(), x);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double t = times[k - 1];
        const double h = times[k] - t;
        const Vec k1 = eval(t, x);
        const Vec k2 = eval(t + 0.5 * h, x + 0.5 * h * k1);
        const Vec k3 = eval(t + 0.5 * h, x + 0.5 * h * k2);
        const Vec k4 = eval(t + h, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite())
            throw NumericError("non-finite state after step to t = " + format_double(times[k]));
        record(times[k], x);
    }
    return traj;
}

std::optional<std::size_t> settle_index(const std::vector<double>& norms, double threshold) {
    if (norms.empty()) return std::nullopt;
    std::size_t k = norms.size();
    while (k > 0 && norms[k - 1] <= threshold) --k;
    if (k == norms.size()) return std::nullopt;
    return k;
}

SettlingReport settling(const Trajectory& traj, double threshold) {
    SettlingReport r;
    r.threshold = threshold;
    if (traj.empty()) return r;
    std::vector<double> norms;
    norms.reserve(traj.size());
    for (const auto& x : traj.states) norms.push_back(x.norm());
    if (auto k = settle_index(norms, threshold)) r.settle_time = traj.times[*k];
    for (const auto& u : traj.controls) r.max_control = std::max(r.max_control, u.norm());
    r.terminal_norm = norms.back();
    return r;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const Trajectory& traj, std::ostream& os, std::size_t stride) {
    if (stride == 0) stride = 1;
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
    const Eigen::Index m = traj.controls.empty() ? 0 : traj.controls.front().size();
    os << 't';
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i + 1;
    for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i + 1;
    for (const auto& name : traj.estimate_names) os << ',' << name;
    for (const auto& [name, col] : traj.extra_columns) os << ',' << name;
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (k % stride != 0 && k + 1 != traj.size()) continue;
        os << format_double(traj.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(traj.states[k](i));
        for (Eigen::Index i = 0; i < m; ++i) os << ',' << format_double(traj.controls[k](i));
        if (!traj.estimates.empty())
            for (Eigen::Index i = 0; i < traj.estimates[k].size(); ++i)
                os << ',' << format_double(traj.estimates[k](i));
        for (const auto& [name, col] : traj.extra_columns) os << ',' << format_double(col[k]);
        os << '\n';
    }
}

} // namespace ptlab
