#include <doctest.h>

#include "pulsefal/stl.hpp"
#include "support/stl_oracle.hpp"

using namespace pulsefal;
using namespace pulsefal::stl;

namespace {

Signal ramp() {
    // y(t) = t on [0, 1], dt = 0.1
    Signal s = Signal::on_grid(0.1, 10);
    std::vector<double> y;
    for (double t : s.times()) y.push_back(t);
    s.add_channel("y", y);
    return s;
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
    auto f = parse("alw[0,10](speed < 120)");
    REQUIRE(f->op == Op::Always);
    CHECK(f->interval.lo == 0);
    CHECK(f->interval.hi == 10);
    const auto& a = f->children[0];
    REQUIRE(a->op == Op::Atom);
    CHECK(a->cmp == Comparator::Less);
    CHECK(a->diff.terms.at("speed") == 1.0);
    CHECK(a->diff.constant == -120.0);

    auto g = parse("ev[0,5](x > 0.9) and alw[0,5](x < 2)");
    REQUIRE(g->op == Op::And);
    REQUIRE(g->children.size() == 2);
    CHECK(g->children[0]->op == Op::Eventually);
    CHECK(g->children[1]->op == Op::Always);
}

TEST_CASE("parse precedence and sugar") {
    // not > and > or > implies
    auto f = parse("not x > 0 and y > 0 or z > 0 -> w > 0");
    REQUIRE(f->op == Op::Implies);
    REQUIRE(f->children[0]->op == Op::Or);
    REQUIRE(f->children[0]->children[0]->op == Op::And);
    CHECK(f->children[0]->children[0]->children[0]->op == Op::Not);

    // temporal operators bind tighter than connectives
    auto g = parse("G[0,1] x > 0 and y > 0");
    REQUIRE(g->op == Op::And);
    CHECK(g->children[0]->op == Op::Always);

    auto u = parse("(x > 0 U[1,2] y > 0)");
    REQUIRE(u->op == Op::Until);
    CHECK(u->interval.lo == 1);

    auto affine = parse("y5 - y4 <= 40");
    CHECK(affine->diff.terms.at("y5") == 1.0);
    CHECK(affine->diff.terms.at("y4") == -1.0);
    CHECK(affine->diff.constant == -40.0);

    auto scaled = parse("(2 * x + 1) / 2 >= 3 * y - 0.5");
    CHECK(scaled->diff.terms.at("x") == 1.0);
    CHECK(scaled->diff.terms.at("y") == -3.0);
    CHECK(scaled->diff.constant == doctest::Approx(1.0));

    auto nested = parse("F[0,2] (G[0,1] (x >= 1))");
    CHECK(nested->op == Op::Eventually);
    CHECK(nested->children[0]->op == Op::Always);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse("alw[5,2](x > 0)"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("x >"), ParseError);
    CHECK_THROWS_AS(parse("x * y > 0"), ParseError);
    CHECK_THROWS_AS(parse("alw[0,1] (x > 0"), ParseError);
    CHECK_THROWS_AS(parse("x > 0 xor y > 0"), ParseError);
    CHECK_THROWS_AS(parse("x # 0"), ParseError);
    try {
        parse("alw[0,1](x > 0)\n  and ev[3,1](y < 0)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 10);
        CHECK(std::string(e.what()).find("interval") != std::string::npos);
    }
}

TEST_CASE("printing round-trips through the parser") {
    oracle::FormulaGen gen(11, 0.1);
    auto trace = oracle::random_trace(gen.rng(), 120, 0.1);
    for (int i = 0; i < 100; ++i) {
        auto f = gen.make(3);
        if (horizon_of(f) > 11) continue;
        auto g = parse(to_string(f));
        CHECK(robustness_classic(f, trace) == doctest::Approx(robustness_classic(g, trace)).epsilon(1e-12));
    }
}

TEST_CASE("classic robustness on the ramp") {
    const auto s = ramp();
    CHECK(robustness_classic(parse("alw[0,1](y < 0.5)"), s) == doctest::Approx(-0.5));
    CHECK(robustness_classic(parse("ev[0,1](y > 0.5)"), s) == doctest::Approx(0.5));
    CHECK(robustness_classic(parse("y > 0"), s, 0.0) == 0.0);
    CHECK(robustness_classic(parse("y >= 0.3"), s, 0.3) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(robustness_classic(parse("alw[0,0.5](y < 0.5)"), s, 0.2) == doctest::Approx(-0.2));
}

TEST_CASE("evaluation errors") {
    const auto s = ramp();
    CHECK_THROWS_AS(robustness_classic(parse("alw[0,2](y < 0.5)"), s), EvalError);
    CHECK_THROWS_AS(robustness_classic(parse("alw[0,0.5](y < 0.5)"), s, 0.6), EvalError);
    CHECK_THROWS_AS(robustness_classic(parse("z < 0.5"), s), EvalError);
}

TEST_CASE("additive combination rules") {
    CHECK(additive_and({-1, -2}) == -3);
    CHECK(additive_and({1, 2}) == 1);
    CHECK(additive_and({1, -2, 3, -0.5}) == -2.5);
    CHECK(additive_and({0, 2}) == 0);
    CHECK(additive_or({-1, -2}) == -1);
    CHECK(additive_or({1, 2, -3}) == 3);
    CHECK(additive_or({0, -2}) == 0);

    Signal s = Signal::on_grid(1, 3);
    s.add_channel("x", {-1, -2, 3, 1});
    CHECK(robustness_additive(parse("alw[0,3](x > 0)"), s) == -3);
    CHECK(robustness_additive(parse("ev[0,3](x > 0)"), s) == 4);
    CHECK(robustness_additive(parse("alw[2,3](x > 0)"), s) == 1);
    CHECK(robustness_additive(parse("ev[0,1](x > 0)"), s) == -1);
}

TEST_CASE("horizon_of") {
    CHECK(horizon_of(parse("x > 0")) == 0);
    CHECK(horizon_of(parse("alw[0,10](ev[0,5](x > 0))")) == 15);
    CHECK(horizon_of(parse("alw[2,4](x>0) and ev[0,9](y<1)")) == 9);
    CHECK(horizon_of(parse("(x > 0 U[0,3] ev[0,2] y > 0)")) == 5);
}

TEST_CASE("monitor agrees with the brute-force oracle") {
    for (double dt : {0.1, 0.25, 1.0}) {
        oracle::FormulaGen gen(static_cast<std::uint64_t>(dt * 1000), dt);
        for (int i = 0; i < 60; ++i) {
            auto f = gen.make(3);
            const auto look = static_cast<std::size_t>(std::ceil(horizon_of(f) / dt)) + 1;
            auto trace = oracle::random_trace(gen.rng(), look + 1 + i % 7, dt);
            const double classic = robustness_classic(f, trace);
            CHECK(classic == doctest::Approx(oracle::rho(f, trace, 0)).epsilon(1e-12));
            const double additive = robustness_additive(f, trace);
            CHECK((classic > 0) == (additive > 0));
            CHECK((classic < 0) == (additive < 0));
            if (classic > 0) CHECK(oracle::holds(f, trace, 0));
            if (classic < 0) CHECK_FALSE(oracle::holds(f, trace, 0));
        }
    }
}

TEST_CASE("negation duality and atom monotonicity") {
    oracle::FormulaGen gen(5, 0.1);
    for (int i = 0; i < 50; ++i) {
        auto f = gen.make(2);
        auto trace = oracle::random_trace(gen.rng(), 150, 0.1);
        if (horizon_of(f) > 14) continue;
        CHECK(robustness_classic(negation(f), trace) == -robustness_classic(f, trace));
    }
    auto trace = oracle::random_trace(gen.rng(), 50, 0.1);
    Signal shifted = Signal::on_grid(0.1, 49);
    auto x = trace.channel("x");
    for (double& v : x) v += 0.75;
    shifted.add_channel("x", x);
    auto f = parse("x > 0.2");
    CHECK(robustness_classic(f, shifted) - robustness_classic(f, trace) == doctest::Approx(0.75));
}
