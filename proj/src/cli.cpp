#include "pulsefal/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pulsefal/csv.hpp"
#include "pulsefal/harness.hpp"

namespace pulsefal {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

opt::OptimizerKind optimizer_kind(const std::string& s) {
    if (s == "random" || s == "random_search") return opt::OptimizerKind::RandomSearch;
    if (s == "turbo" || s == "turbo_lite") return opt::OptimizerKind::TurboLite;
    throw UsageError("unknown optimizer '" + s + "' (expected random or turbo)");
}

stl::Semantics semantics_kind(const std::string& s) {
    if (s == "classic") return stl::Semantics::Classic;
    if (s == "additive") return stl::Semantics::Additive;
    throw UsageError("unknown semantics '" + s + "' (expected classic or additive)");
}

std::vector<FreeMask> parse_masks(const std::string& text) {
    if (text == "sweep") return harness::sweep_masks();
    std::vector<FreeMask> masks;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        masks.push_back(FreeMask::parse(item));
        if (masks.back().empty()) throw UsageError("empty mask in '" + text + "'");
    }
    if (masks.empty()) throw UsageError("no masks given");
    return masks;
}

void print_params(std::ostream& out, const Benchmark& b, const DecodedPoint& p) {
    for (std::size_t ch = 0; ch < b.inputs.size(); ++ch) {
        const auto& pp = p.channels[ch];
        out << "  " << b.inputs[ch].name << ": low'=" << csv::format_double(pp.low_n)
            << " period'=" << csv::format_double(pp.period_n) << " width'=" << csv::format_double(pp.width_n)
            << " high'=" << csv::format_double(pp.high_n) << " delay'=" << csv::format_double(pp.delay_n) << "\n";
    }
    for (const auto& [name, value] : p.static_values) out << "  " << name << " = " << csv::format_double(value) << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse-input falsification of STL specifications", "pulsefal"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Falsify one spec with one free-parameter mask");
    std::string run_bench, run_spec, run_mask = "W", run_opt = "turbo", run_sem = "classic", witness_path = "witness.csv";
    std::size_t run_budget = 1000, run_init = 0;
    std::uint64_t run_seed = 0;
    bool expect_falsified = false, run_static = false;
    run->add_option("--benchmark", run_bench, "Benchmark JSON file")->required();
    run->add_option("--spec", run_spec, "Spec name inside the benchmark")->required();
    run->add_option("--mask", run_mask, "Free parameters, e.g. W or L-P-W")->capture_default_str();
    run->add_option("--optimizer", run_opt, "random | turbo")->capture_default_str();
    run->add_option("--budget", run_budget, "Maximum simulations")->capture_default_str();
    run->add_option("--seed", run_seed, "Random seed")->capture_default_str();
    run->add_option("--init-samples", run_init, "Initial design size (0 = 2 * dimension)")->capture_default_str();
    run->add_option("--semantics", run_sem, "classic | additive")->capture_default_str();
    run->add_option("--witness", witness_path, "Where to write the falsifying input trace")->capture_default_str();
    run->add_flag("--expect-falsified", expect_falsified, "Exit 1 when no counterexample is found");
    run->add_flag("--static", run_static, "Also search the benchmark's static parameters");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Repeated falsification over mask combinations");
    harness::ExperimentConfig cfg;
    std::string sweep_masks = "sweep", sweep_opt = "turbo", sweep_sem = "classic";
    std::vector<std::string> sweep_specs;
    sweep->add_option("--benchmark", cfg.benchmark_files, "Benchmark JSON file (repeatable)")->required();
    sweep->add_option("--specs", sweep_specs, "Spec names (default: all)")->delimiter(',');
    sweep->add_option("--masks", sweep_masks, "'sweep' or comma-separated masks like L,W,L-W")->capture_default_str();
    sweep->add_option("--reps", cfg.repetitions, "Repetitions per cell")->capture_default_str();
    sweep->add_option("--budget", cfg.budget, "Maximum simulations per run")->capture_default_str();
    sweep->add_option("--seed", cfg.base_seed, "Base seed")->capture_default_str();
    sweep->add_option("--optimizer", sweep_opt, "random | turbo")->capture_default_str();
    sweep->add_option("--semantics", sweep_sem, "classic | additive")->capture_default_str();
    sweep->add_option("--jobs", cfg.parallelism, "Concurrent runs")->capture_default_str();
    sweep->add_option("--out", cfg.output_dir, "Output directory")->required();

    // monitor
    auto* monitor = app.add_subcommand("monitor", "Robustness of a trace under both semantics");
    std::string mon_spec, mon_trace;
    double mon_t0 = 0.0;
    monitor->add_option("--spec", mon_spec, "STL formula text or a file containing it")->required();
    monitor->add_option("--trace", mon_trace, "Trace CSV (time column plus channels)")->required();
    monitor->add_option("--t0", mon_t0, "Evaluation time")->capture_default_str();

    // validate
    auto* validate = app.add_subcommand("validate", "Check benchmark configuration files");
    std::vector<std::string> val_files;
    validate->add_option("--benchmark,files", val_files, "Benchmark JSON file(s)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*run) {
            const Benchmark b = load_benchmark_file(run_bench);
            FreeMask mask = FreeMask::parse(run_mask);
            mask.include_static_params = mask.include_static_params || run_static;
            opt::OptimizerConfig oc;
            oc.kind = optimizer_kind(run_opt);
            oc.budget = run_budget;
            oc.seed = run_seed;
            oc.init_samples = run_init;
            const auto outcome = falsify(b, run_spec, mask, oc, semantics_kind(run_sem));
            out << "benchmark: " << b.name << "\nspec: " << run_spec << "\nmask: " << mask.label()
                << "\nfalsified: " << (outcome.falsified ? "true" : "false")
                << "\nsimulations: " << outcome.simulations_used
                << "\nbest_robustness: " << csv::format_double(outcome.best_robustness) << "\nbest_parameters:\n";
            print_params(out, b, outcome.best_point);
            if (outcome.witness) {
                csv::write_file(witness_path, csv::write_trace(*outcome.witness));
                out << "witness: " << witness_path << "\n";
            }
            return expect_falsified && !outcome.falsified ? 1 : 0;
        }
        if (*sweep) {
            cfg.spec_names = sweep_specs;
            cfg.masks = parse_masks(sweep_masks);
            cfg.optimizer = optimizer_kind(sweep_opt);
            cfg.semantics = semantics_kind(sweep_sem);
            const auto results = harness::run_experiment(cfg);
            harness::write_outputs(results, cfg.output_dir);
            std::size_t failures = 0;
            for (const auto& r : results.runs)
                if (!r.error.empty()) {
                    ++failures;
                    err << "run failed: " << r.benchmark << "/" << r.spec << " " << r.mask << " rep " << r.rep << ": "
                        << r.error << "\n";
                }
            out << "runs: " << results.runs.size() << " (" << failures << " failed)\n";
            for (const auto& row : harness::aggregate(results)) out << row.spec << "  " << row.mask << "  " << row.cell() << "\n";
            out << "wrote results.csv, aggregate.csv, coverage.csv, cactus.csv to " << cfg.output_dir << "\n";
            return 0;
        }
        if (*monitor) {
            std::string text = mon_spec;
            if (std::filesystem::is_regular_file(mon_spec)) text = csv::read_file(mon_spec);
            const stl::Formula f = stl::parse(text);
            const Signal trace = csv::read_trace_file(mon_trace);
            out << "classic: " << csv::format_double(stl::robustness_classic(f, trace, mon_t0)) << "\n";
            out << "additive: " << csv::format_double(stl::robustness_additive(f, trace, mon_t0)) << "\n";
            return 0;
        }
        if (*validate) {
            for (const auto& path : val_files) {
                const Benchmark b = load_benchmark_file(path);
                out << path << ": ok (" << b.name << ", " << b.inputs.size() << " input(s), " << b.specs.size()
                    << " spec(s), model " << to_string(b.model.kind) << ")\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace pulsefal
