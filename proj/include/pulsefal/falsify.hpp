#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulsefal/optimize.hpp"
#include "pulsefal/signal.hpp"
#include "pulsefal/stl.hpp"
#include "pulsefal/system.hpp"

namespace pulsefal {

enum class PulseParam { Low = 0, Period = 1, Width = 2, High = 3, Delay = 4 };

inline constexpr std::array<PulseParam, 5> kAllPulseParams = {PulseParam::Low, PulseParam::Period, PulseParam::Width,
                                                              PulseParam::High, PulseParam::Delay};

char param_letter(PulseParam p);

/// Subset of {L, P, W, H, D} exposed to the optimizer, plus whether the
/// benchmark's static parameters are searched too.
struct FreeMask {
    std::array<bool, 5> params{};
    bool include_static_params = false;

    bool has(PulseParam p) const { return params[static_cast<int>(p)]; }
    void set(PulseParam p, bool on = true) { params[static_cast<int>(p)] = on; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Canonical label in L, P, W, H, D order joined by '-', e.g. "L-P-W".
    std::string label() const;

    /// Accepts "L-P-W", "LPW", "l,p,w" and similar. Throws on unknown letters.
    static FreeMask parse(const std::string& text);
    static FreeMask of(std::initializer_list<PulseParam> ps);

    bool operator==(const FreeMask&) const = default;
};

struct Coordinate {
    enum class Kind { Pulse, Static };
    Kind kind = Kind::Pulse;
    std::size_t channel = 0;  // input channel index (Pulse) or static parameter index (Static)
    PulseParam param = PulseParam::Low;
    InputRange native;
};

struct ParamSpace {
    const Benchmark* benchmark = nullptr;
    FreeMask mask;
    PulseParams fixed_defaults;
    std::vector<Coordinate> coordinates;

    std::size_t dimension() const { return coordinates.size(); }
};

/// Pulse parameters that are not free stay at low'=0, period'=0.5, width'=0.5,
/// delay'=0, high'=1.
PulseParams fixed_pulse_defaults();

ParamSpace build_param_space(const Benchmark& benchmark, const FreeMask& mask);

struct DecodedPoint {
    std::vector<PulseParams> channels;
    std::map<std::string, double> static_values;

    bool operator==(const DecodedPoint&) const = default;
};

DecodedPoint decode(std::span<const double> point, const ParamSpace& space);

/// Multi-channel input trace on the benchmark grid for decoded parameters.
Signal synthesize_inputs(const Benchmark& benchmark, const DecodedPoint& decoded);

struct FalsificationOutcome {
    bool falsified = false;
    std::size_t simulations_used = 0;
    double best_robustness = 0.0;
    /// Decoded parameters of the best evaluation; always present after a run.
    DecodedPoint best_point;
    std::optional<Signal> witness;
    std::vector<double> history;
    opt::OptimizationResult optimization;
};

/// Robustness of one decoded point; simulation failures score +infinity.
double evaluate_point(const Benchmark& benchmark, const stl::Formula& spec, const DecodedPoint& decoded,
                      stl::Semantics semantics);

FalsificationOutcome falsify(const Benchmark& benchmark, const std::string& spec_name, const FreeMask& mask,
                             opt::OptimizerConfig config, stl::Semantics semantics);

}  // namespace pulsefal
