#include "catch_amalgamated.hpp"

#include "ptlab/errors.hpp"
#include "ptlab/rng.hpp"
#include "ptlab/signals.hpp"

#include <cmath>
#include <set>

using namespace ptlab;
using Catch::Approx;

TEST_CASE("sgn and signed power", "[signals]") {
    CHECK(sgn(2.0) == 1.0);
    CHECK(sgn(-0.1) == -1.0);
    CHECK(sgn(0.0) == 0.0);
    CHECK(signed_pow(0.0, 0.0) == 0.0);
    CHECK(signed_pow(-8.0, 1.0 / 3.0) == Approx(-2.0));
    CHECK(signed_pow(4.0, 0.5) == Approx(2.0));
    CHECK(signed_pow(-3.0, 2.0) == Approx(-9.0));
}

TEST_CASE("signed power is odd", "[signals][property]") {
    Xorshift64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-10, 10);
        const double a = rng.uniform(0, 3);
        CHECK(signed_pow(-v, a) == -signed_pow(v, a));
    }
}

TEST_CASE("signal kinds", "[signals]") {
    const auto c = Signal::constant(0.3);
    CHECK(c(0.0) == 0.3);
    CHECK(c(100.0) == 0.3);
    CHECK(c.sup() == 0.3);

    const auto s = Signal::sinusoid(1.0, 0.5, 5.0);
    CHECK(s(0.0) == 1.0);
    CHECK(s(0.3) == Approx(1.0 + 0.5 * std::sin(1.5)));
    CHECK(s.sup() == 1.5);

    const auto q = Signal::square(1.0, 0.5, 10.0);
    CHECK(q(0.0) == 1.5);
    CHECK(q(0.4) == 0.5); // sin(4) < 0
    CHECK(Signal::sinusoid(-1.0, 0.25, 1.0).sup() == 1.25);
}

TEST_CASE("signal kind names round-trip", "[signals]") {
    for (auto k : {Signal::Kind::constant, Signal::Kind::sinusoid, Signal::Kind::square})
        CHECK(parse_signal_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_signal_kind("chirp"), ValidationError);
}

TEST_CASE("xorshift stream is fixed", "[rng]") {
    Xorshift64 a(42), b(42), c(43);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    Xorshift64 r(0);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const auto k = r.integer(1, 5);
        CHECK(k >= 1);
        CHECK(k <= 5);
        seen.insert(k);
        const double l = r.log_uniform(0.1, 10.0);
        CHECK(l >= 0.1 * (1 - 1e-12));
        CHECK(l <= 10.0 * (1 + 1e-12));
    }
    CHECK(seen.size() == 5);
}
