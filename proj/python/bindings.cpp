#include "ptlab/app.hpp"
#include "ptlab/bench_compare.hpp"
#include "ptlab/config.hpp"
#include "ptlab/errors.hpp"
#include "ptlab/mas.hpp"
#include "ptlab/scaling.hpp"
#include "ptlab/settling.hpp"
#include "ptlab/sim_engine.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ptlab;

namespace {

TimeHorizon horizon(double T, std::optional<double> epsilon, std::optional<double> mu_cap) {
    return TimeHorizon::make(T, epsilon, mu_cap);
}

py::dict trajectory_dict(const Trajectory& tr) {
    py::dict d;
    d["t"] = tr.times;
    std::vector<std::vector<double>> x;
    for (const auto& s : tr.states) x.emplace_back(s.data(), s.data() + s.size());
    d["x"] = x;
    return d;
}

} // namespace

PYBIND11_MODULE(_ptlab, m) {
    m.doc() = "Prescribed-time control kernels";
    m.attr("__version__") = kVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def(
        "mu", [](double t, double T, std::optional<double> eps, std::optional<double> cap) { return mu(t, horizon(T, eps, cap)); },
        py::arg("t"), py::arg("T") = 1.0, py::arg("epsilon") = py::none(), py::arg("mu_cap") = py::none(),
        "State-scaling gain T/(T-t), capped.");
    m.def(
        "time_scale",
        [](double t, double T) {
            const auto s = time_scale(t, horizon(T, std::nullopt, std::nullopt));
            return py::make_tuple(s.tau, s.rate);
        },
        py::arg("t"), py::arg("T") = 1.0, "(tau, a'(t)) of the time-scaling map.");

    m.def(
        "settling_bound",
        [](const std::string& kind, std::map<std::string, double> coefficients, double V0) {
            return settling_bound(LyapunovSpec{parse_lyapunov_kind(kind), std::move(coefficients), V0});
        },
        py::arg("kind"), py::arg("coefficients"), py::arg("V0") = 1.0);
    m.def(
        "simulate_inequality",
        [](const std::string& kind, std::map<std::string, double> coefficients, double V0, double dt,
           std::optional<double> T, std::optional<double> disturbance) {
            InequalityOptions opt;
            opt.dt = dt;
            if (T) opt.horizon = horizon(*T, std::nullopt, std::nullopt);
            if (disturbance) opt.disturbance = Signal::constant(*disturbance);
            const auto run = simulate_inequality({parse_lyapunov_kind(kind), std::move(coefficients), V0}, opt);
            py::dict d = trajectory_dict(run.trajectory);
            d["settle_time"] = run.settle_time;
            d["zero_time"] = run.zero_time;
            d["threshold"] = run.threshold;
            return d;
        },
        py::arg("kind"), py::arg("coefficients"), py::arg("V0") = 1.0, py::arg("dt") = 1e-4, py::arg("T") = py::none(),
        py::arg("disturbance") = py::none());

    m.def(
        "double_integrator_controller",
        [](const std::string& kind, double x1, double x2, double t, double T, double T1, double T2) {
            return double_integrator_controller(parse_double_integrator_kind(kind), {x1, x2}, t, {T, T1, T2});
        },
        py::arg("kind"), py::arg("x1"), py::arg("x2"), py::arg("t") = 0.0, py::arg("T") = 1.0, py::arg("T1") = 0.2,
        py::arg("T2") = 0.8);
    m.def("ft_first_order_settling", &ft_first_order_settling, py::arg("k"), py::arg("alpha"), py::arg("x0"));
    m.def("ft_equals_pt_gain", &ft_equals_pt_gain, py::arg("alpha"));

    m.def(
        "laplacian", [](const Eigen::MatrixXd& weights) { return laplacian(WeightedGraph{weights, true}); },
        py::arg("weights"), "Laplacian of a weight matrix a_ij (agent i listens to j).");
    m.def(
        "lambda2",
        [](const Eigen::MatrixXd& weights) {
            WeightedGraph g{weights, false};
            if (auto v = g.check(); !v.empty()) throw ValidationError(v);
            return lambda2(g);
        },
        py::arg("weights"));
    m.def(
        "containment_c_min",
        [](const Eigen::MatrixXd& weights, Eigen::Index root) {
            return containment_decompose(WeightedGraph{weights, true}, root).c_min;
        },
        py::arg("weights"), py::arg("root") = 0);

    m.def(
        "run_config",
        [](const std::string& path) {
            const auto cfg = load_config(path);
            RunOutput out;
            {
                py::gil_scoped_release release;
                out = execute(cfg);
            }
            py::dict files;
            for (const auto& [name, content] : out.files) files[py::str(name)] = py::bytes(content);
            py::dict d;
            d["command"] = std::string(to_string(cfg.command));
            d["report"] = out.report;
            d["files"] = files;
            return d;
        },
        py::arg("path"), "Runs a scenario file in memory; returns the report and file contents.");
}
