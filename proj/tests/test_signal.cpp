#include <doctest.h>

#include <random>

#include "pulsefal/signal.hpp"

using namespace pulsefal;

TEST_CASE("denormalize evaluates the pulse equations") {
    SUBCASE("brake range, half period") {
        auto p = denormalize({0.0, 0.5, 0.5, 1.0, 0.0}, {0, 325}, 10);
        CHECK(p.period == doctest::Approx(5));
        CHECK(p.width == doctest::Approx(2.5));
        CHECK(p.delay == 0);
        CHECK(p.low == 0);
        CHECK(p.high == doctest::Approx(325));
    }
    SUBCASE("all zero") {
        auto p = denormalize({0, 0, 0, 0, 0}, {0, 1}, 10);
        CHECK(p.period == 0);
        CHECK(p.width == 0);
        CHECK(p.delay == 0);
        CHECK(p.low == 0);
        CHECK(p.high == 0);
    }
    SUBCASE("all one, low pinned to upper") {
        auto p = denormalize({1, 1, 1, 1, 1}, {-1, 1}, 5);
        CHECK(p.period == 5);
        CHECK(p.width == 5);
        CHECK(p.delay == 5);
        CHECK(p.low == 1);
        CHECK(p.high == 1);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(denormalize({0, 0.5, 0.5, 1, 0}, {0, 1}, 0.0), SignalError);
        CHECK_THROWS_AS(denormalize({0, 0.5, 0.5, 1, 0}, {0, 1}, -1.0), SignalError);
        CHECK_THROWS_AS(denormalize({NAN, 0.5, 0.5, 1, 0}, {0, 1}, 10), SignalError);
        CHECK_THROWS_AS(denormalize({0, 0.5, 0.5, 1, 0}, {0, INFINITY}, 10), SignalError);
        CHECK_THROWS_AS(denormalize({0, 2.5, 0.5, 1, 0}, {0, 1}, 10), SignalError);
    }
}

TEST_CASE("synthesize_pulse shapes") {
    SUBCASE("single rising step") {
        auto s = synthesize_pulse({0, 2, 0.5, 1, 0.3}, {0, 1}, 10, 0.1);
        REQUIRE(s.size() == 101);
        const auto& v = s.channel(0);
        for (std::size_t k = 0; k < 30; ++k) CHECK(v[k] == 0.0);
        for (std::size_t k = 30; k <= 100; ++k) CHECK(v[k] == 1.0);
    }
    SUBCASE("delay one gives constant low") {
        auto s = synthesize_pulse({0.25, 0.7, 0.3, 0.9, 1.0}, {0, 2}, 10, 0.1);
        for (double x : s.channel(0)) CHECK(x == doctest::Approx(0.5));
    }
    SUBCASE("zero period collapses to low") {
        auto s = synthesize_pulse({0.5, 0, 0, 0, 0}, {0, 2}, 1, 0.5);
        REQUIRE(s.size() == 3);
        for (double x : s.channel(0)) CHECK(x == 1.0);
    }
    SUBCASE("high first within each period") {
        // period 4, width 1, no delay: high on [0,1), [4,5), [8,9)
        auto s = synthesize_pulse({0, 0.4, 0.25, 1, 0}, {0, 1}, 10, 0.5);
        const auto& v = s.channel(0);
        const std::vector<double> expected{1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0};
        CHECK(v == expected);
    }
    SUBCASE("off-grid transitions land on the next instant") {
        // delay 0.25 with dt 0.1: first high sample at t = 0.3
        auto s = synthesize_pulse({0, 2, 0.5, 1, 0.025}, {0, 1}, 10, 0.1);
        CHECK(s.channel(0)[2] == 0.0);
        CHECK(s.channel(0)[3] == 1.0);
    }
    SUBCASE("grid must divide the horizon") { CHECK_THROWS_AS(synthesize_pulse({}, {0, 1}, 10, 0.3), SignalError); }
}

TEST_CASE("sample_at is a zero-order hold") {
    Signal s({0, 0.5, 1}, {{0, 1, 1}}, {"u"});
    CHECK(s.sample_at(0.6)[0] == 1);
    CHECK(s.sample_at(0.0)[0] == 0);
    CHECK(s.sample_at(0.49)[0] == 0);
    CHECK(s.sample_at(1.0)[0] == 1);
    CHECK_THROWS_AS(s.sample_at(1.5), SignalError);
    CHECK_THROWS_AS(s.sample_at(-0.1), SignalError);
}

TEST_CASE("signal invariants are enforced") {
    CHECK_THROWS_AS(Signal({0.1, 0.2}, {}, {}), SignalError);
    CHECK_THROWS_AS(Signal({0, 0.1, 0.3}, {}, {}), SignalError);
    CHECK_THROWS_AS(Signal({0, 0.1}, {{1, 2, 3}}, {"a"}), SignalError);
    CHECK_THROWS_AS(Signal({0, 0.1}, {{1, 2}, {3, 4}}, {"a", "a"}), SignalError);
    CHECK_THROWS_AS(Signal({0, 0.1}, {{1, 2}}, {"a", "b"}), SignalError);
}

TEST_CASE("validate_period_range couples period to delay") {
    CHECK(validate_period_range({0, 1.5, 0.5, 1, 0}, true).has_value());
    CHECK_FALSE(validate_period_range({0, 1.5, 0.5, 1, 0}, false).has_value());
    CHECK_FALSE(validate_period_range({0, 0.5, 0.5, 1, 0}, true).has_value());
    CHECK(validate_period_range({0, 2.01, 0.5, 1, 0}, false).has_value());
    CHECK(validate_period_range({-0.1, 0.5, 0.5, 1, 0}, false).has_value());
}

TEST_CASE("pulse properties over random parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0, 1);
    for (int i = 0; i < 500; ++i) {
        PulseParams p{unit(rng), 2 * unit(rng), unit(rng), unit(rng), unit(rng)};
        const double lo = -10 + 20 * unit(rng);
        const InputRange r{lo, lo + 0.1 + 10 * unit(rng)};
        const auto phys = denormalize(p, r, 10);
        CHECK(phys.low <= phys.high);
        CHECK(phys.width <= phys.period);
        const auto a = synthesize_pulse(p, r, 10, 0.1);
        const auto b = synthesize_pulse(p, r, 10, 0.1);
        CHECK(a == b);
        for (double v : a.channel(0)) {
            CHECK(v >= r.lower);
            CHECK(v <= r.upper);
        }
    }
}
