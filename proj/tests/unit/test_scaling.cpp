#include "catch_amalgamated.hpp"

#include "ptlab/errors.hpp"
#include "ptlab/scaling.hpp"

#include <cmath>

using namespace ptlab;
using Catch::Approx;

TEST_CASE("mu at reference points", "[scaling]") {
    const auto h = TimeHorizon::make(1.0);
    CHECK(mu(0.0, h) == 1.0);
    CHECK(mu(0.5, h) == Approx(2.0).epsilon(1e-15));
    CHECK(mu(1.0 - 1e-9, h) == 1e6);
    CHECK(cap_engaged(1.0 - 1e-9, h));
    CHECK_FALSE(cap_engaged(0.5, h));
}

TEST_CASE("horizon defaults and validation", "[scaling]") {
    const auto h = TimeHorizon::make(2.0);
    CHECK(h.stop_margin == Approx(2e-4));
    CHECK(h.mu_cap == 1e6);
    CHECK(h.stop_time() == Approx(2.0 - 2e-4));
    CHECK_THROWS_AS(TimeHorizon::make(0.0), ValidationError);
    CHECK_THROWS_AS(TimeHorizon::make(-1.0), ValidationError);
    CHECK_THROWS_AS(TimeHorizon::make(1.0, 1.5), ValidationError);
    CHECK_THROWS_AS(TimeHorizon::make(1.0, std::nullopt, 0.5), ValidationError);
}

TEST_CASE("mu outside the window is a domain error", "[scaling]") {
    const auto h = TimeHorizon::make(1.0);
    CHECK_THROWS_AS(mu(1.0, h), DomainError);
    CHECK_THROWS_AS(mu(-0.1, h), DomainError);
    CHECK_THROWS_AS(time_scale(1.5, h), DomainError);
    CHECK_THROWS_AS(scale_rate(1.0, h), DomainError);
}

TEST_CASE("mu dot over mu squared is 1/T", "[scaling]") {
    CHECK(mu_dot_over_mu_sq(TimeHorizon::make(1.0)) == 1.0);
    CHECK(mu_dot_over_mu_sq(TimeHorizon::make(2.0)) == 0.5);
    CHECK(mu_dot_over_mu_sq(TimeHorizon::make(10.0)) == Approx(0.1).epsilon(1e-15));

    // Finite-difference oracle of mu'(t) / mu(t)^2.
    const auto h = TimeHorizon::make(3.0, std::nullopt, kNoCap);
    for (double t : {0.1, 1.0, 2.5}) {
        const double e = 1e-6;
        const double d = (mu(t + e, h) - mu(t - e, h)) / (2 * e);
        CHECK(d / (mu(t, h) * mu(t, h)) == Approx(1.0 / 3.0).epsilon(1e-6));
    }
}

TEST_CASE("time scale at reference points", "[scaling]") {
    const auto h1 = TimeHorizon::make(1.0);
    auto s = time_scale(0.0, h1);
    CHECK(s.tau == 0.0);
    CHECK(s.rate == 1.0);

    s = time_scale(1.0 - std::exp(-1.0), h1);
    CHECK(s.tau == Approx(1.0).epsilon(1e-14));
    CHECK(s.rate == Approx(std::exp(1.0)).epsilon(1e-14));

    s = time_scale(0.5, TimeHorizon::make(2.0));
    CHECK(s.tau == Approx(std::log(4.0 / 3.0)).epsilon(1e-15));
    CHECK(s.rate == Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("scaling identities and monotonicity", "[scaling][property]") {
    for (double T : {0.5, 1.0, 7.0}) {
        const auto h = TimeHorizon::make(T, std::nullopt, kNoCap);
        double prev_mu = 0.0, prev_tau = -1.0;
        for (int i = 0; i <= 1000; ++i) {
            const double t = h.stop_time() * i / 1000.0;
            const double m = mu(t, h);
            const auto s = time_scale(t, h);
            CHECK(m >= prev_mu);
            CHECK(s.tau > prev_tau);
            CHECK(s.rate == Approx(1.0 / (T - t)).epsilon(1e-14));
            CHECK(m == Approx(T * s.rate).epsilon(1e-14));
            CHECK(scale_rate(t, h) == s.rate);
            CHECK(scale_rate_at_tau(s.tau, h) == Approx(s.rate).epsilon(1e-9));
            prev_mu = m;
            prev_tau = s.tau;
        }
    }
}

TEST_CASE("cap saturates mu and a' together", "[scaling]") {
    const auto h = TimeHorizon::make(1.0, 1e-9, 100.0);
    CHECK(mu(0.999, h) == 100.0);
    CHECK(scale_rate(0.999, h) == 100.0);
    CHECK(mu(0.5, h) == 2.0);
}
