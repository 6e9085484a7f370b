#include "catch_amalgamated.hpp"

#include "ptlab/bench_compare.hpp"
#include "ptlab/errors.hpp"
#include "ptlab/signals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ptlab;
using Catch::Approx;

TEST_CASE("first-order finite-time settling", "[bench]") {
    CHECK(ft_first_order_settling(1, 1.0 / 3.0, 1) == Approx(1.5));
    CHECK(ft_first_order_settling(1, 0.5, 4) == Approx(4.0));
    CHECK(ft_first_order_settling(1, 0.5, 0) == 0.0);
    CHECK(ft_first_order_settling(2, 0.5, -4) == Approx(2.0));
    CHECK_THROWS_AS(ft_first_order_settling(0, 0.5, 1), ValidationError);
    CHECK_THROWS_AS(ft_first_order_settling(1, 1.0, 1), ValidationError);
    CHECK(ft_first_order_state(1, 0.5, 4, 5) == 0.0);
    CHECK(ft_first_order_state(1, 0.5, 4, 2) == Approx(1.0)); // (2 - t/2)^2
}

TEST_CASE("equivalent prescribed-time gain", "[bench]") {
    CHECK(ft_equals_pt_gain(0.5) == Approx(2.0));
    CHECK(ft_equals_pt_gain(2.0 / 3.0) == Approx(3.0));
    CHECK(ft_equals_pt_gain(1e-9) == Approx(1.0));
}

TEST_CASE("finite-time and prescribed-time trajectories coincide", "[bench][property]") {
    for (double alpha : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        for (double x0 : {-1.0, 0.5, 2.0}) {
            const auto r = ft_pt_equivalence(alpha, x0, 1.0, 1e-5);
            INFO("alpha " << alpha << " x0 " << x0);
            CHECK(r.settling == Approx(ft_first_order_settling(1, alpha, x0)));
            CHECK(r.tolerance == Approx(1e-6 + 1e-4));
            CHECK(r.max_gap <= r.tolerance);
        }
    }
}

TEST_CASE("double-integrator laws at reference points", "[bench]") {
    const Eigen::Vector2d zero(0, 0);
    for (auto kind : {DoubleIntegratorKind::finite, DoubleIntegratorKind::fixed, DoubleIntegratorKind::predefined,
                      DoubleIntegratorKind::prescribed})
        CHECK(double_integrator_controller(kind, zero, 0.1) == Approx(0.0).margin(1e-12));
    CHECK(double_integrator_controller(DoubleIntegratorKind::prescribed, {0.2, -0.2}, 0.0) == Approx(-0.8));
    CHECK(double_integrator_controller(DoubleIntegratorKind::prescribed, {0.2, -0.2}, 1.5) == 0.0);
    CHECK(double_integrator_controller(DoubleIntegratorKind::finite, {0, 1}, 0.0) ==
          Approx(-1 - std::pow(0.6, 0.2)));
    // x = (1, 0): s = sqrt(2)
    const double s = std::sqrt(2.0);
    CHECK(double_integrator_controller(DoubleIntegratorKind::fixed, {1, 0}, 0.0) ==
          Approx(-2.0 - std::sqrt(s + s * s * s)));
}

TEST_CASE("predefined-time shaping function", "[bench]") {
    CHECK(pdt_phi(0.0, 0.2) == 0.0);
    CHECK(pdt_phi(1.0, 0.5) == Approx(5.0 * std::exp(1.0)));
    CHECK(pdt_phi(-1.0, 0.5) == Approx(-5.0 * std::exp(1.0)));
    for (double v : {-2.0, -0.3, 0.05, 0.7, 1.5}) {
        const double e = 1e-6;
        CHECK(pdt_phi_derivative(v, 0.2) ==
              Approx((pdt_phi(v + e, 0.2) - pdt_phi(v - e, 0.2)) / (2 * e)).epsilon(1e-6));
    }
    CHECK(std::isfinite(pdt_phi_derivative(0.0, 0.2)));
}

TEST_CASE("claimed bounds", "[bench]") {
    const DoubleIntegratorParams p;
    CHECK_FALSE(claimed_bound(DoubleIntegratorKind::finite, p));
    CHECK(*claimed_bound(DoubleIntegratorKind::fixed, p) == Approx(std::numbers::pi * (1 + 1 / std::sqrt(2.0))));
    CHECK(*claimed_bound(DoubleIntegratorKind::fixed, p) == Approx(5.363).margin(5e-4));
    CHECK(*claimed_bound(DoubleIntegratorKind::predefined, p) == Approx(1.0));
    CHECK(*claimed_bound(DoubleIntegratorKind::prescribed, p) == 1.0);
}

TEST_CASE("double-integrator comparison", "[bench]") {
    std::vector<ComparisonScenario> scenarios;
    for (auto kind : {DoubleIntegratorKind::finite, DoubleIntegratorKind::fixed, DoubleIntegratorKind::predefined,
                      DoubleIntegratorKind::prescribed})
        for (Eigen::Vector2d x0 : {Eigen::Vector2d(0.2, -0.2), Eigen::Vector2d(0.4, 0.0)}) {
            ComparisonScenario sc;
            sc.kind = kind;
            sc.x0 = x0;
            scenarios.push_back(sc);
        }
    const auto rows = run_comparison(scenarios, 4);
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) {
        INFO(to_string(r.scenario.kind));
        REQUIRE(r.report.settle_time);
        if (r.bound) CHECK(r.within_bound);
        CHECK(r.report.threshold == Approx(comparison_threshold(r.scenario.x0)));
    }
    const double ft_a = *rows[0].report.settle_time, ft_b = *rows[1].report.settle_time;
    const double pt_a = *rows[6].report.settle_time, pt_b = *rows[7].report.settle_time;
    CHECK(std::abs(ft_a - ft_b) / std::min(ft_a, ft_b) >= 0.10);
    CHECK(std::abs(pt_a - pt_b) / std::min(pt_a, pt_b) <= 0.01);

    const auto serial = run_comparison(scenarios, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(serial[i].csv_name == rows[i].csv_name);
        CHECK(serial[i].report.settle_time == rows[i].report.settle_time);
    }

    std::ostringstream os;
    write_summary_csv(rows, os);
    CHECK(os.str().rfind("kind,x1_0,x2_0,settle_time,bound,within_bound,max_u\n", 0) == 0);
    std::ostringstream py;
    write_plot_script(rows, py);
    CHECK(py.str().find(rows[0].csv_name) != std::string::npos);
}

TEST_CASE("prescribed run coasts past T", "[bench]") {
    ComparisonScenario sc;
    sc.kind = DoubleIntegratorKind::prescribed;
    sc.horizon = 2.0;
    const auto r = run_scenario(sc);
    CHECK(r.trajectory.times.back() == Approx(2.0));
    CHECK(r.trajectory.controls.back()(0) == 0.0);
    REQUIRE(r.report.settle_time);
    CHECK(*r.report.settle_time <= 1.0 + sc.dt);
}

TEST_CASE("kind names round-trip", "[bench]") {
    for (auto kind : {DoubleIntegratorKind::finite, DoubleIntegratorKind::fixed, DoubleIntegratorKind::predefined,
                      DoubleIntegratorKind::prescribed})
        CHECK(parse_double_integrator_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_double_integrator_kind("sliding"), ValidationError);
}
