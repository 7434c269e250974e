#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pulsefal/falsify.hpp"

namespace pulsefal::harness {

/// The twelve mask columns of the dimensionality study.
std::vector<FreeMask> sweep_masks();

struct ExperimentConfig {
    std::vector<std::string> benchmark_files;
    /// Empty selects every spec of every benchmark.
    std::vector<std::string> spec_names;
    std::vector<FreeMask> masks;
    std::size_t repetitions = 5;
    std::size_t budget = 1000;
    std::uint64_t base_seed = 0;
    opt::OptimizerKind optimizer = opt::OptimizerKind::TurboLite;
    stl::Semantics semantics = stl::Semantics::Classic;
    std::size_t parallelism = 1;
    std::string output_dir;

    void validate() const;
};

struct RunRecord {
    std::string benchmark;
    std::string spec;
    std::string mask;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    bool falsified = false;
    std::size_t sims = 0;
    double best_robustness = 0.0;
    /// Non-empty when the run threw; the run then counts as not falsified.
    std::string error;

    bool operator==(const RunRecord&) const = default;
};

struct ResultSet {
    std::vector<RunRecord> runs;

    bool multi_benchmark() const;

    bool operator==(const ResultSet&) const = default;
};

/// Spec identifier used by the aggregate views; qualified as
/// "benchmark/spec" when the result set spans several benchmarks.
std::string spec_id(const RunRecord& r, bool multi_benchmark);

/// FNV-1a over "spec|mask|rep"; stable across platforms and runs.
std::uint64_t stable_hash(const std::string& spec, const std::string& mask, std::size_t rep);
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& spec, const std::string& mask, std::size_t rep);

/// One falsification per (benchmark, spec, mask, repetition). Output order and
/// contents do not depend on `parallelism`.
ResultSet run_experiment(const ExperimentConfig& config);
ResultSet run_experiment(const std::vector<Benchmark>& benchmarks, const ExperimentConfig& config);

struct AggregateRow {
    std::string spec;
    std::string mask;
    std::size_t runs = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    std::optional<std::size_t> mean_sims_successful;
    std::vector<RunRecord> records;

    /// "60 (20)" style; "0 (-)" when nothing was falsified.
    std::string cell() const;
};

std::vector<AggregateRow> aggregate(const ResultSet& results);

/// Integer mean rounded half-up.
std::size_t rounded_mean(std::size_t sum, std::size_t count);

struct CoverageEntry {
    std::size_t size = 0;
    std::string mask;
    std::size_t specs_covered = 0;
};

struct CoverageSummary {
    /// Every evaluated mask, ordered by size then L, P, W, H, D order.
    std::vector<CoverageEntry> entries;
    /// Per combination size: best mask label(s) and their coverage count.
    std::map<std::size_t, std::vector<std::string>> best_masks;
    std::map<std::size_t, std::size_t> best_count;
};

/// A mask covers a spec when one of its member parameters falsified that spec
/// on its own, or when the mask's own runs falsified it. `mask_success` maps a
/// mask label to the specs its runs falsified; the five single-parameter masks
/// are always evaluated.
CoverageSummary combination_coverage(const std::map<std::string, std::set<PulseParam>>& per_param_success,
                                     const std::map<std::string, std::set<std::string>>& mask_success);

/// Derives both inputs from a result set.
CoverageSummary combination_coverage(const ResultSet& results);

struct CactusPoint {
    std::string mask;
    std::size_t rank = 0;
    std::size_t sims = 0;

    bool operator==(const CactusPoint&) const = default;
};

/// Per mask (first-appearance order): successful runs' simulation counts
/// sorted ascending, ranked 1..k.
std::vector<CactusPoint> cactus_data(const ResultSet& results);

std::string results_csv(const ResultSet& results);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string coverage_csv(const CoverageSummary& coverage);
std::string cactus_csv(const std::vector<CactusPoint>& points);

/// Writes results.csv, aggregate.csv, coverage.csv and cactus.csv into `dir`.
void write_outputs(const ResultSet& results, const std::string& dir);

}  // namespace pulsefal::harness
