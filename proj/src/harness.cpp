#include "pulsefal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "pulsefal/csv.hpp"

namespace pulsefal::harness {

std::vector<FreeMask> sweep_masks() {
    std::vector<FreeMask> out;
    for (const char* label : {"L", "P", "W", "H", "D", "L-P", "L-W", "P-W", "L-P-W", "L-P-W-H", "L-P-W-D", "L-P-W-H-D"})
        out.push_back(FreeMask::parse(label));
    return out;
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    if (budget < 1) throw std::invalid_argument("budget must be at least 1");
    if (masks.empty()) throw std::invalid_argument("mask list is empty");
    if (parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");
}

bool ResultSet::multi_benchmark() const {
    return std::any_of(runs.begin(), runs.end(), [&](const RunRecord& o) { return o.benchmark != runs.front().benchmark; });
}

std::string spec_id(const RunRecord& r, bool multi_benchmark) {
    return multi_benchmark ? r.benchmark + "/" + r.spec : r.spec;
}

std::uint64_t stable_hash(const std::string& spec, const std::string& mask, std::size_t rep) {
    const std::string key = spec + "|" + mask + "|" + std::to_string(rep);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& spec, const std::string& mask, std::size_t rep) {
    return base_seed + stable_hash(spec, mask, rep);
}

ResultSet run_experiment(const ExperimentConfig& config) {
    std::vector<Benchmark> benchmarks;
    for (const auto& path : config.benchmark_files) benchmarks.push_back(load_benchmark_file(path));
    return run_experiment(benchmarks, config);
}

ResultSet run_experiment(const std::vector<Benchmark>& benchmarks, const ExperimentConfig& config) {
    config.validate();
    if (benchmarks.empty()) throw std::invalid_argument("no benchmarks given");

    struct Cell {
        const Benchmark* benchmark;
        std::string spec;
        FreeMask mask;
        std::size_t rep;
    };
    std::vector<Cell> cells;
    std::set<std::string> matched;
    for (const auto& b : benchmarks) {
        for (const auto& [spec_name, formula] : b.specs) {
            const bool wanted = config.spec_names.empty() ||
                                std::find(config.spec_names.begin(), config.spec_names.end(), spec_name) !=
                                    config.spec_names.end();
            if (!wanted) continue;
            matched.insert(spec_name);
            for (const auto& mask : config.masks)
                for (std::size_t r = 0; r < config.repetitions; ++r) cells.push_back({&b, spec_name, mask, r});
        }
    }
    for (const auto& name : config.spec_names)
        if (!matched.count(name)) throw std::invalid_argument("spec '" + name + "' not found in any benchmark");

    ResultSet out;
    out.runs.resize(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Cell& c = cells[i];
            RunRecord& rec = out.runs[i];
            rec.benchmark = c.benchmark->name;
            rec.spec = c.spec;
            rec.mask = c.mask.label();
            rec.rep = c.rep;
            rec.seed = derive_seed(config.base_seed, c.spec, rec.mask, c.rep);
            try {
                opt::OptimizerConfig oc;
                oc.kind = config.optimizer;
                oc.budget = config.budget;
                oc.seed = rec.seed;
                const auto outcome = falsify(*c.benchmark, c.spec, c.mask, oc, config.semantics);
                rec.falsified = outcome.falsified;
                rec.sims = outcome.simulations_used;
                rec.best_robustness = outcome.best_robustness;
            } catch (const std::exception& e) {
                rec.falsified = false;
                rec.sims = 0;
                rec.best_robustness = std::numeric_limits<double>::quiet_NaN();
                rec.error = e.what();
            }
        }
    };
    const std::size_t threads = std::min(config.parallelism, std::max<std::size_t>(cells.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return out;
}

std::size_t rounded_mean(std::size_t sum, std::size_t count) { return (2 * sum + count) / (2 * count); }

std::string AggregateRow::cell() const {
    if (!mean_sims_successful) return csv::format_double(success_rate) + " (-)";
    return csv::format_double(success_rate) + " (" + std::to_string(*mean_sims_successful) + ")";
}

std::vector<AggregateRow> aggregate(const ResultSet& results) {
    std::vector<AggregateRow> rows;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    const bool multi = results.multi_benchmark();
    for (const auto& r : results.runs) {
        const auto key = std::make_pair(spec_id(r, multi), r.mask);
        auto [it, fresh] = index.try_emplace(key, rows.size());
        if (fresh) {
            rows.emplace_back();
            rows.back().spec = key.first;
            rows.back().mask = key.second;
        }
        rows[it->second].records.push_back(r);
    }
    for (auto& row : rows) {
        std::size_t sim_sum = 0;
        row.runs = row.records.size();
        for (const auto& r : row.records) {
            if (!r.falsified) continue;
            ++row.successes;
            sim_sum += r.sims;
        }
        row.success_rate = 100.0 * static_cast<double>(row.successes) / static_cast<double>(row.runs);
        if (row.successes > 0) row.mean_sims_successful = rounded_mean(sim_sum, row.successes);
    }
    return rows;
}

namespace {

// Sort key: size first, then lexicographic over L, P, W, H, D membership.
bool mask_order(const std::string& a, const std::string& b) {
    const FreeMask ma = FreeMask::parse(a), mb = FreeMask::parse(b);
    if (ma.size() != mb.size()) return ma.size() < mb.size();
    for (auto p : kAllPulseParams)
        if (ma.has(p) != mb.has(p)) return ma.has(p);
    return a < b;
}

}  // namespace

CoverageSummary combination_coverage(const std::map<std::string, std::set<PulseParam>>& per_param_success,
                                     const std::map<std::string, std::set<std::string>>& mask_success) {
    std::vector<std::string> labels;
    for (auto p : kAllPulseParams) labels.push_back(std::string(1, param_letter(p)));
    for (const auto& [label, specs] : mask_success)
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    std::sort(labels.begin(), labels.end(), mask_order);

    CoverageSummary out;
    for (const auto& label : labels) {
        const FreeMask mask = FreeMask::parse(label);
        std::set<std::string> covered;
        for (const auto& [spec, params] : per_param_success)
            for (auto p : params)
                if (mask.has(p)) covered.insert(spec);
        if (auto it = mask_success.find(label); it != mask_success.end())
            covered.insert(it->second.begin(), it->second.end());

        CoverageEntry e{mask.size(), label, covered.size()};
        out.entries.push_back(e);
        auto& best = out.best_count[e.size];
        auto& names = out.best_masks[e.size];
        if (names.empty() || e.specs_covered > best) {
            best = e.specs_covered;
            names = {label};
        } else if (e.specs_covered == best) {
            names.push_back(label);
        }
    }
    return out;
}

CoverageSummary combination_coverage(const ResultSet& results) {
    std::map<std::string, std::set<PulseParam>> per_param;
    std::map<std::string, std::set<std::string>> by_mask;
    const bool multi = results.multi_benchmark();
    for (const auto& r : results.runs) {
        const std::string spec = spec_id(r, multi);
        per_param[spec];
        by_mask[r.mask];
        if (!r.falsified) continue;
        by_mask[r.mask].insert(spec);
        const FreeMask m = FreeMask::parse(r.mask);
        if (m.size() == 1 && !m.include_static_params)
            for (auto p : kAllPulseParams)
                if (m.has(p)) per_param[spec].insert(p);
    }
    return combination_coverage(per_param, by_mask);
}

std::vector<CactusPoint> cactus_data(const ResultSet& results) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> sims;
    for (const auto& r : results.runs) {
        if (!sims.count(r.mask)) order.push_back(r.mask);
        auto& s = sims[r.mask];
        if (r.falsified) s.push_back(r.sims);
    }
    std::vector<CactusPoint> out;
    for (const auto& mask : order) {
        auto s = sims[mask];
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i < s.size(); ++i) out.push_back({mask, i + 1, s[i]});
    }
    return out;
}

std::string results_csv(const ResultSet& results) {
    std::string out = csv::join_row({"benchmark", "spec", "mask", "rep", "seed", "falsified", "sims", "best_robustness"});
    for (const auto& r : results.runs) {
        out += csv::join_row({r.benchmark, r.spec, r.mask, std::to_string(r.rep), std::to_string(r.seed),
                              r.falsified ? "true" : "false", std::to_string(r.sims),
                              csv::format_double(r.best_robustness)});
    }
    return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = csv::join_row({"spec", "mask", "success_rate", "mean_sims"});
    for (const auto& r : rows) {
        out += csv::join_row({r.spec, r.mask, csv::format_double(r.success_rate),
                              r.mean_sims_successful ? std::to_string(*r.mean_sims_successful) : "-"});
    }
    return out;
}

std::string coverage_csv(const CoverageSummary& coverage) {
    std::string out = csv::join_row({"size", "mask", "specs_covered"});
    for (const auto& e : coverage.entries)
        out += csv::join_row({std::to_string(e.size), e.mask, std::to_string(e.specs_covered)});
    return out;
}

std::string cactus_csv(const std::vector<CactusPoint>& points) {
    std::string out = csv::join_row({"mask", "rank", "sims"});
    for (const auto& p : points) out += csv::join_row({p.mask, std::to_string(p.rank), std::to_string(p.sims)});
    return out;
}

void write_outputs(const ResultSet& results, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    csv::write_file((base / "results.csv").string(), results_csv(results));
    csv::write_file((base / "aggregate.csv").string(), aggregate_csv(aggregate(results)));
    csv::write_file((base / "coverage.csv").string(), coverage_csv(combination_coverage(results)));
    csv::write_file((base / "cactus.csv").string(), cactus_csv(cactus_data(results)));
}

}  // namespace pulsefal::harness
