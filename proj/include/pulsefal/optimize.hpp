#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace pulsefal::opt {

class OptimizerError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class OptimizerKind { RandomSearch, TurboLite };

struct TrustRegionSettings {
    double initial_side = 0.8;
    double min_side = 1.0 / 128.0;
    double max_side = 1.6;
    int success_tolerance = 3;
    /// 0 means "use the problem dimension".
    int failure_tolerance = 0;
    /// Candidates per step are per_dim_candidates * dim, capped at max_candidates.
    int per_dim_candidates = 100;
    int max_candidates = 5000;
    /// Surrogate fits use at most this many points (nearest to the incumbent).
    int max_fit_points = 100;
};

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::TurboLite;
    std::size_t budget = 1000;
    /// 0 means 2 * dim.
    std::size_t init_samples = 0;
    TrustRegionSettings trust_region;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EvalRecord {
    std::vector<double> point;
    double value = 0.0;
    std::size_t index = 0;  // 1-based

    bool operator==(const EvalRecord&) const = default;
};

struct OptimizationResult {
    EvalRecord best;
    std::vector<EvalRecord> history;
    bool stopped_early = false;
    std::size_t evaluations_used = 0;
    /// Evaluations spent on the first Latin hypercube design (turbo_lite only).
    std::size_t initial_design_evaluations = 0;
    std::size_t restarts = 0;

    bool operator==(const OptimizationResult&) const = default;
};

/// Non-finite return values are recorded as +infinity.
using Objective = std::function<double(std::span<const double>)>;

/// 64-bit Mersenne twister; uniform doubles use the top 53 bits so results do
/// not depend on the standard library's distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng);

OptimizationResult random_search(const Objective& objective, std::size_t dim, const OptimizerConfig& config);
OptimizationResult turbo_lite_minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config);

/// Dispatches on config.kind.
OptimizationResult minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config);

/// Cubic radial-basis interpolant with a linear polynomial tail.
class RbfSurrogate {
public:
    double predict(std::span<const double> x) const;
    std::size_t dimension() const { return dim_; }

private:
    friend std::optional<RbfSurrogate> fit_surrogate(const std::vector<std::vector<double>>&,
                                                     const std::vector<double>&);
    std::size_t dim_ = 0;
    std::vector<std::vector<double>> centers_;
    std::vector<double> weights_;
    std::vector<double> tail_;  // constant then one coefficient per coordinate
};

/// nullopt signals a degenerate fit: identical values, fewer than two distinct
/// points, or a system that stays singular after a 1e-8 ridge.
std::optional<RbfSurrogate> fit_surrogate(const std::vector<std::vector<double>>& points,
                                          const std::vector<double>& values);

}  // namespace pulsefal::opt
