#include "ptlab/bench_compare.hpp"

#include "ptlab/errors.hpp"
#include "ptlab/signals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <thread>

namespace ptlab {

double ft_first_order_settling(double k, double alpha, double x0) {
    std::vector<std::string> errs;
    if (!(k > 0.0)) errs.emplace_back("k > 0 violated");
    if (!(alpha > 0.0 && alpha < 1.0)) errs.emplace_back("alpha in (0, 1) violated");
    if (!std::isfinite(x0)) errs.emplace_back("x0 must be finite");
    if (!errs.empty()) throw ValidationError(std::move(errs));
    return std::pow(std::abs(x0), 1.0 - alpha) / (k * (1.0 - alpha));
}

double ft_first_order_state(double k, double alpha, double x0, double t) {
    const double w = std::pow(std::abs(x0), 1.0 - alpha) - k * (1.0 - alpha) * t;
    if (w <= 0.0) return 0.0;
    return sgn(x0) * std::pow(w, 1.0 / (1.0 - alpha));
}

double ft_equals_pt_gain(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha in (0, 1) violated");
    return 1.0 / (1.0 - alpha);
}

EquivalenceResult ft_pt_equivalence(double alpha, double x0, double k, double dt) {
    EquivalenceResult r;
    r.alpha = alpha;
    r.x0 = x0;
    r.settling = ft_first_order_settling(k, alpha, x0);
    r.tolerance = 1e-6 + 10.0 * dt;
    if (r.settling == 0.0) return r;

    const TimeHorizon h = TimeHorizon::make(r.settling, std::nullopt, kNoCap);
    const double kpt = ft_equals_pt_gain(alpha);
    Vec init(1);
    init << x0;
    const Grid grid{h.stop_time(), dt};
    const auto ft = integrate([&](double, const Vec& x) -> Vec { return Vec::Constant(1, -k * signed_pow(x(0), alpha)); },
                              init, grid);
    IntegrateOptions opts;
    opts.guard = h;
    const auto pt = integrate(
        [&](double t, const Vec& x) -> Vec { return Vec::Constant(1, -kpt * scale_rate(t, h) * x(0)); }, init,
        grid, opts);
    for (std::size_t i = 0; i < ft.size(); ++i)
        r.max_gap = std::max(r.max_gap, std::abs(ft.states[i](0) - pt.states[i](0)));
    return r;
}

DoubleIntegratorKind parse_double_integrator_kind(std::string_view name) {
    if (name == "finite") return DoubleIntegratorKind::finite;
    if (name == "fixed") return DoubleIntegratorKind::fixed;
    if (name == "predefined") return DoubleIntegratorKind::predefined;
    if (name == "prescribed") return DoubleIntegratorKind::prescribed;
    throw ValidationError("unknown controller kind '" + std::string(name) +
                          "' (finite, fixed, predefined, prescribed)");
}

std::string_view to_string(DoubleIntegratorKind k) {
    switch (k) {
    case DoubleIntegratorKind::finite: return "finite";
    case DoubleIntegratorKind::fixed: return "fixed";
    case DoubleIntegratorKind::predefined: return "predefined";
    case DoubleIntegratorKind::prescribed: return "prescribed";
    }
    return "?";
}

double pdt_phi(double v, double Ti) {
    const double a = std::abs(v);
    return 5.0 / (2.0 * Ti) * std::exp(std::pow(a, 0.4)) * std::pow(a, 0.6) * sgn(v);
}

double pdt_phi_derivative(double v, double Ti) {
    const double a = std::max(std::abs(v), 1e-12);
    return 5.0 / (2.0 * Ti) * std::exp(std::pow(a, 0.4)) * (0.4 + 0.6 * std::pow(a, -0.4));
}

double double_integrator_controller(DoubleIntegratorKind kind, const Eigen::Vector2d& x, double t,
                                    const DoubleIntegratorParams& p) {
    const double x1 = x(0), x2 = x(1);
    double u = 0.0;
    switch (kind) {
    case DoubleIntegratorKind::finite:
        u = -signed_pow(x2, 1.0 / 3.0) - signed_pow(x1 + 0.6 * signed_pow(x2, 5.0 / 3.0), 0.2);
        break;
    case DoubleIntegratorKind::fixed: {
        const double s = x2 + signed_pow(signed_pow(x2, 2.0) + x1 + x1 * x1 * x1, 0.5);
        u = -(1.0 + 3.0 * x1 * x1) / 2.0 * sgn(s) - signed_pow(s + s * s * s, 0.5);
        break;
    }
    case DoubleIntegratorKind::predefined: {
        const double sigma = pdt_phi(x1, p.T1) + x2;
        u = -pdt_phi_derivative(x1, p.T1) * x2 - pdt_phi(sigma, p.T2);
        break;
    }
    case DoubleIntegratorKind::prescribed: {
        if (t >= p.T) return 0.0;
        const double m = 1.0 / (p.T - t);
        u = -2.0 * m * (x2 + 3.0 * m * x1) - 3.0 * m * m * x1 - 3.0 * m * x2;
        break;
    }
    }
    if (!std::isfinite(u))
        throw NumericError("double_integrator_controller(" + std::string(to_string(kind)) +
                           "): non-finite control at t = " + format_double(t));
    return u;
}

std::optional<double> claimed_bound(DoubleIntegratorKind kind, const DoubleIntegratorParams& p) {
    switch (kind) {
    case DoubleIntegratorKind::finite: return std::nullopt;
    case DoubleIntegratorKind::fixed: return std::numbers::pi + std::numbers::pi / std::sqrt(2.0);
    case DoubleIntegratorKind::predefined: return p.T1 + p.T2;
    case DoubleIntegratorKind::prescribed: return p.T;
    }
    return std::nullopt;
}

double comparison_threshold(const Eigen::Vector2d& x0) { return 1e-3 * (1.0 + x0.norm()); }

namespace {

void validate(const ComparisonScenario& s) {
    std::vector<std::string> errs;
    if (!(s.dt > 0.0)) errs.emplace_back("integration.dt > 0 violated");
    if (!s.x0.allFinite()) errs.emplace_back("initial.x must be finite");
    if (s.horizon && !(*s.horizon > 0.0)) errs.emplace_back("integration.t_end > 0 violated");
    if (s.kind == DoubleIntegratorKind::prescribed && !(s.params.T > 0.0)) errs.emplace_back("horizon.T > 0 violated");
    if (s.kind == DoubleIntegratorKind::predefined) {
        if (!(s.params.T1 > 0.0)) errs.emplace_back("controller.T1 > 0 violated");
        if (!(s.params.T2 > 0.0)) errs.emplace_back("controller.T2 > 0 violated");
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
}

Vec plant(DoubleIntegratorKind kind, const DoubleIntegratorParams& p, double t, const Vec& x) {
    Vec dx(2);
    dx << x(1), double_integrator_controller(kind, Eigen::Vector2d(x(0), x(1)), t, p);
    return dx;
}

} // namespace

ComparisonRow run_scenario(const ComparisonScenario& s) {
    validate(s);
    ComparisonRow row;
    row.scenario = s;
    row.bound = claimed_bound(s.kind, s.params);

    auto control = [&](double t, const Vec& x) -> Vec {
        return Vec::Constant(1, double_integrator_controller(s.kind, Eigen::Vector2d(x(0), x(1)), t, s.params));
    };
    IntegrateOptions opts;
    opts.control = control;
    const Vec x0 = s.x0;

    if (s.kind != DoubleIntegratorKind::prescribed) {
        const double horizon = s.horizon.value_or(8.0);
        row.trajectory = integrate([&](double t, const Vec& x) { return plant(s.kind, s.params, t, x); }, x0,
                                   Grid{horizon, s.dt}, opts);
    } else {
        const TimeHorizon h = TimeHorizon::make(s.params.T, s.stop_margin, kNoCap);
        const double horizon = s.horizon.value_or(h.stop_time());
        opts.guard = h;
        row.trajectory = integrate([&](double t, const Vec& x) { return plant(s.kind, s.params, t, x); }, x0,
                                   Grid{std::min(horizon, h.stop_time()), s.dt}, opts);
        if (horizon > h.stop_time()) {
            // post-horizon extension with the control switched off
            auto coast = [](double, const Vec& x) -> Vec {
                Vec dx(2);
                dx << x(1), 0.0;
                return dx;
            };
            IntegrateOptions copts;
            copts.control = [](double, const Vec&) -> Vec { return Vec::Zero(1); };
            const double t0 = row.trajectory.times.back();
            Trajectory tail = integrate(coast, row.trajectory.states.back(), Grid{horizon - t0, s.dt}, copts);
            for (std::size_t i = 1; i < tail.size(); ++i) {
                row.trajectory.times.push_back(t0 + tail.times[i]);
                row.trajectory.states.push_back(tail.states[i]);
                row.trajectory.controls.push_back(tail.controls[i]);
            }
        }
    }

    row.report = settling(row.trajectory, comparison_threshold(s.x0));
    if (row.report.settle_time)
        row.trajectory.add_event(*row.report.settle_time, EventKind::settled);
    row.within_bound = row.bound && row.report.settle_time && *row.report.settle_time <= *row.bound + s.dt;
    char name[96];
    std::snprintf(name, sizeof name, "%s_x0_%g_%g.csv", std::string(to_string(s.kind)).c_str(), s.x0(0), s.x0(1));
    row.csv_name = name;
    return row;
}

std::vector<ComparisonRow> run_comparison(const std::vector<ComparisonScenario>& scenarios, unsigned threads) {
    for (const auto& s : scenarios) validate(s);
    std::vector<ComparisonRow> rows(scenarios.size());
    std::vector<std::exception_ptr> errors(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < scenarios.size();) {
            try {
                rows[i] = run_scenario(scenarios[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(scenarios.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

void write_summary_csv(const std::vector<ComparisonRow>& rows, std::ostream& os) {
    os << "kind,x1_0,x2_0,settle_time,bound,within_bound,max_u\n";
    for (const auto& r : rows) {
        os << to_string(r.scenario.kind) << ',' << format_double(r.scenario.x0(0)) << ','
           << format_double(r.scenario.x0(1)) << ','
           << (r.report.settle_time ? format_double(*r.report.settle_time) : "none") << ','
           << (r.bound ? format_double(*r.bound) : "none") << ',' << (r.within_bound ? 1 : 0) << ','
           << format_double(r.report.max_control) << '\n';
    }
}

void write_plot_script(const std::vector<ComparisonRow>& rows, std::ostream& os) {
    os << "import csv\nimport matplotlib.pyplot as plt\n\nRUNS = [\n";
    for (const auto& r : rows) os << "    \"" << r.csv_name << "\",\n";
    os << "]\n\n"
          "fig, axes = plt.subplots(len(RUNS) // 2 or 1, 2, figsize=(10, 2.5 * max(1, len(RUNS) // 2)), squeeze=False)\n"
          "for ax, name in zip(axes.flat, RUNS):\n"
          "    with open(name) as fh:\n"
          "        rows = list(csv.DictReader(fh))\n"
          "    t = [float(r['t']) for r in rows]\n"
          "    ax.plot(t, [float(r['x1']) for r in rows], label='x1')\n"
          "    ax.plot(t, [float(r['x2']) for r in rows], label='x2')\n"
          "    ax.set_title(name)\n"
          "    ax.legend()\n"
          "fig.tight_layout()\n"
          "fig.savefig('comparison.png')\n";
}

} // namespace ptlab
