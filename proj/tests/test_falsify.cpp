#include <doctest.h>

#include "pulsefal/falsify.hpp"

using namespace pulsefal;

namespace {

const Benchmark& lag() {
    static const Benchmark b = load_benchmark_file(PULSEFAL_BENCHMARK_DIR "/lag.json");
    return b;
}

const Benchmark& cc() {
    static const Benchmark b = load_benchmark_file(PULSEFAL_BENCHMARK_DIR "/cc.json");
    return b;
}

opt::OptimizerConfig config(opt::OptimizerKind kind, std::size_t budget, std::uint64_t seed) {
    opt::OptimizerConfig c;
    c.kind = kind;
    c.budget = budget;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("mask labels") {
    CHECK(FreeMask::parse("L-P-W").label() == "L-P-W");
    CHECK(FreeMask::parse("wpl").label() == "L-P-W");
    CHECK(FreeMask::parse("D,H").label() == "H-D");
    CHECK(FreeMask::parse("W+S").include_static_params);
    CHECK(FreeMask::parse("LPWHD").size() == 5);
    CHECK_THROWS(FreeMask::parse("LX"));
}

TEST_CASE("build_param_space dimensions and ranges") {
    CHECK(build_param_space(cc(), FreeMask::parse("W")).dimension() == 2);
    CHECK(build_param_space(cc(), FreeMask::parse("L-P-W-H-D")).dimension() == 10);
    CHECK(build_param_space(cc(), FreeMask::parse("L-P-W")).dimension() == 6);

    auto pd = build_param_space(lag(), FreeMask::parse("P-D"));
    REQUIRE(pd.dimension() == 2);
    CHECK(pd.coordinates[0].param == PulseParam::Period);
    CHECK(pd.coordinates[0].native.upper == 1.0);
    CHECK(pd.coordinates[1].param == PulseParam::Delay);

    auto p = build_param_space(lag(), FreeMask::parse("P"));
    CHECK(p.coordinates[0].native.upper == 2.0);

    // Channel-major order, L P W H D within a channel.
    auto full = build_param_space(cc(), FreeMask::parse("D-L-W"));
    REQUIRE(full.dimension() == 6);
    CHECK(full.coordinates[0].channel == 0);
    CHECK(full.coordinates[0].param == PulseParam::Low);
    CHECK(full.coordinates[2].param == PulseParam::Delay);
    CHECK(full.coordinates[3].channel == 1);

    CHECK_THROWS_AS(build_param_space(lag(), FreeMask{}), std::invalid_argument);

    const Benchmark dsm = load_benchmark_file(PULSEFAL_BENCHMARK_DIR "/dsm.json");
    CHECK(build_param_space(dsm, FreeMask::parse("W")).dimension() == 1);
    CHECK(build_param_space(dsm, FreeMask::parse("W+S")).dimension() == 4);

    const auto d = fixed_pulse_defaults();
    CHECK(d == PulseParams{0.0, 0.5, 0.5, 1.0, 0.0});
}

TEST_CASE("decode maps the unit cube onto native ranges") {
    auto p = build_param_space(lag(), FreeMask::parse("P"));
    auto d = decode(std::vector<double>{0.5}, p);
    CHECK(d.channels[0].period_n == 1.0);

    auto lw = build_param_space(lag(), FreeMask::parse("L-W"));
    d = decode(std::vector<double>{0.0, 0.0}, lw);
    CHECK(d.channels[0].low_n == 0.0);
    CHECK(d.channels[0].width_n == 0.0);
    CHECK(d.channels[0].period_n == 0.5);
    CHECK(d.channels[0].high_n == 1.0);
    CHECK(d.channels[0].delay_n == 0.0);

    CHECK_THROWS_AS(decode(std::vector<double>{0.1}, lw), std::invalid_argument);
    CHECK_THROWS_AS(decode(std::vector<double>{0.1, 1.5}, lw), std::invalid_argument);

    const Benchmark dsm = load_benchmark_file(PULSEFAL_BENCHMARK_DIR "/dsm.json");
    auto ws = build_param_space(dsm, FreeMask::parse("W+S"));
    d = decode(std::vector<double>{0.3, 0.0, 0.5, 1.0}, ws);
    CHECK(d.static_values.at("x1_init") == doctest::Approx(-0.1));
    CHECK(d.static_values.at("x2_init") == doctest::Approx(0.0));
    CHECK(d.static_values.at("x3_init") == doctest::Approx(0.1));
    auto w = build_param_space(dsm, FreeMask::parse("W"));
    CHECK(decode(std::vector<double>{0.3}, w).static_values.at("x2_init") == 0.0);
}

TEST_CASE("unmasked coordinates keep their defaults") {
    opt::Rng rng(5);
    const auto defaults = fixed_pulse_defaults();
    for (const char* label : {"L", "P", "W", "H", "D", "L-W", "P-D"}) {
        auto space = build_param_space(cc(), FreeMask::parse(label));
        for (int i = 0; i < 20; ++i) {
            std::vector<double> pt(space.dimension());
            for (double& x : pt) x = rng.uniform();
            for (const auto& ch : decode(pt, space).channels) {
                if (!space.mask.has(PulseParam::Low)) CHECK(ch.low_n == defaults.low_n);
                if (!space.mask.has(PulseParam::Period)) CHECK(ch.period_n == defaults.period_n);
                if (!space.mask.has(PulseParam::Width)) CHECK(ch.width_n == defaults.width_n);
                if (!space.mask.has(PulseParam::High)) CHECK(ch.high_n == defaults.high_n);
                if (!space.mask.has(PulseParam::Delay)) CHECK(ch.delay_n == defaults.delay_n);
            }
        }
    }
}

TEST_CASE("falsify the lag with random search on width") {
    auto out = falsify(lag(), "phi1", FreeMask::parse("W"), config(opt::OptimizerKind::RandomSearch, 100, 0),
                       stl::Semantics::Classic);
    CHECK(out.falsified);
    CHECK(out.best_robustness < 0);
    REQUIRE(out.witness);
    CHECK(out.simulations_used == out.history.size());
    // Re-simulating the witness reproduces the recorded robustness exactly.
    const Signal trace = simulate(lag(), *out.witness, out.best_point.static_values);
    CHECK(stl::robustness_classic(lag().specs.at("phi1"), trace) == out.best_robustness);
}

TEST_CASE("unfalsifiable spec uses the whole budget") {
    Benchmark b = lag();
    b.specs["safe"] = stl::parse("alw[0,10](y <= 2)");
    for (auto kind : {opt::OptimizerKind::RandomSearch, opt::OptimizerKind::TurboLite}) {
        auto out = falsify(b, "safe", FreeMask::parse("L-W"), config(kind, 30, 1), stl::Semantics::Classic);
        CHECK_FALSE(out.falsified);
        CHECK(out.simulations_used == 30);
        CHECK_FALSE(out.witness);
    }
}

TEST_CASE("first sample already negative") {
    Benchmark b = lag();
    b.specs["trivial"] = stl::parse("y > 0.5");  // y(0) = 0
    auto out = falsify(b, "trivial", FreeMask::parse("W"), config(opt::OptimizerKind::TurboLite, 50, 3),
                       stl::Semantics::Classic);
    CHECK(out.falsified);
    CHECK(out.simulations_used == 1);
}

TEST_CASE("falsify argument errors") {
    CHECK_THROWS_AS(falsify(lag(), "nope", FreeMask::parse("W"), config(opt::OptimizerKind::RandomSearch, 10, 0),
                            stl::Semantics::Classic),
                    std::invalid_argument);
    CHECK_THROWS_AS(falsify(cc(), "phi1", FreeMask::parse("L-P-W-H-D"), config(opt::OptimizerKind::TurboLite, 19, 0),
                            stl::Semantics::Classic),
                    std::invalid_argument);
}

TEST_CASE("additive semantics falsifies the same lag spec") {
    auto out = falsify(lag(), "phi1", FreeMask::parse("W"), config(opt::OptimizerKind::RandomSearch, 100, 0),
                       stl::Semantics::Additive);
    CHECK(out.falsified);
    const Signal trace = simulate(lag(), *out.witness);
    CHECK(stl::robustness_additive(lag().specs.at("phi1"), trace) == out.best_robustness);
}

TEST_CASE("simulation failures score +inf and the loop continues") {
    Benchmark b = lag();
    b.model.params["tau"] = 1e-6;  // RK4 blows up at this step size
    b.specs["phi"] = stl::parse("alw[0,10](y <= 0.85)");
    auto out = falsify(b, "phi", FreeMask::parse("W"), config(opt::OptimizerKind::RandomSearch, 5, 0),
                       stl::Semantics::Classic);
    CHECK(out.simulations_used == 5);
}
