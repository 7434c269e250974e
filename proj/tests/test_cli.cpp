#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "pulsefal/cli.hpp"
#include "pulsefal/csv.hpp"

using namespace pulsefal;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("pulsefal_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string lag = PULSEFAL_BENCHMARK_DIR "/lag.json";

}  // namespace

TEST_CASE("monitor prints both semantics") {
    auto dir = scratch("monitor");
    csv::write_file((dir / "ramp.csv").string(), "time,x\n0,0\n0.5,0.5\n1,1\n");
    auto r = cli({"monitor", "--spec", "alw[0,1](x <= 0.5)", "--trace", (dir / "ramp.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out == "classic: -0.5\nadditive: -0.5\n");

    r = cli({"monitor", "--spec", "ev[0,1](x >= 2) and x <= 1", "--trace", (dir / "ramp.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out == "classic: -1\nadditive: -1\n");

    r = cli({"monitor", "--spec", "alw[0,1](x <=", "--trace", (dir / "ramp.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("error") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("run writes a witness") {
    auto dir = scratch("run");
    const auto witness = (dir / "w.csv").string();
    auto r = cli({"run", "--benchmark", lag, "--spec", "phi1", "--mask", "W", "--optimizer", "random", "--budget", "100",
                  "--seed", "0", "--witness", witness, "--expect-falsified"});
    CHECK(r.code == 0);
    CHECK(r.out.find("falsified: true") != std::string::npos);
    REQUIRE(fs::exists(witness));
    auto trace = csv::read_trace_file(witness);
    CHECK(trace.find_channel("u"));
    fs::remove_all(dir);
}

TEST_CASE("run exit codes") {
    auto dir = scratch("codes");
    // Budget too small for anything to happen except the initial design.
    auto r = cli({"run", "--benchmark", lag, "--spec", "phi3", "--mask", "H", "--optimizer", "random", "--budget", "3",
                  "--witness", (dir / "w.csv").string(), "--expect-falsified"});
    CHECK(r.code == 1);
    CHECK(cli({"run", "--benchmark", lag, "--spec", "phi1", "--bogus"}).code == 2);
    CHECK(cli({"run", "--benchmark", lag, "--spec", "nope"}).code == 2);
    CHECK(cli({"run", "--benchmark", lag, "--spec", "phi1", "--optimizer", "annealing"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    fs::remove_all(dir);
}

TEST_CASE("validate") {
    auto r = cli({"validate", "--benchmark", lag, PULSEFAL_BENCHMARK_DIR "/cc.json"});
    CHECK(r.code == 0);
    CHECK(r.out.find("lag.json: ok") != std::string::npos);
    CHECK(r.out.find("cc.json: ok") != std::string::npos);

    auto dir = scratch("validate");
    csv::write_file((dir / "bad.json").string(), R"({"name": "x", "colour": 1})");
    CHECK(cli({"validate", "--benchmark", (dir / "bad.json").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep writes the four tables") {
    auto dir = scratch("sweep");
    auto r = cli({"sweep", "--benchmark", lag, "--specs", "phi1,phi4", "--masks", "W,L-P", "--reps", "2", "--budget",
                  "20", "--optimizer", "random", "--out", dir.string()});
    CHECK(r.code == 0);
    for (const char* f : {"results.csv", "aggregate.csv", "coverage.csv", "cactus.csv"}) CHECK(fs::exists(dir / f));
    auto rows = csv::parse(csv::read_file((dir / "results.csv").string()));
    CHECK(rows.size() == 1 + 2 * 2 * 2);
    fs::remove_all(dir);
}
